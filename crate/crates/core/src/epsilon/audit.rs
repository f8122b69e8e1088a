use serde::{Deserialize, Serialize};

use crate::distfit::{fit_normal, NormalParams};
use crate::error::Result;
use crate::io::AuditConfig;
use crate::loss_model::{transform_losses, LossSet, LossTransform};

use super::{ecdf_rate_curve, epsilon_star_discrete, epsilon_star_ecdf, epsilon_star_parametric, EpsilonStarResult, Method};

/// An audit result together with the intermediate fits that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditOutcome {
    pub result: EpsilonStarResult,
    pub n_train: usize,
    pub n_pop: usize,
    /// Present for the parametric method only.
    pub transform: Option<LossTransform>,
    pub fit_train: Option<NormalParams>,
    pub fit_pop: Option<NormalParams>,
}

/// Runs the configured method on raw losses.
///
/// * `parametric`: joint logit transform, a Normal fit per set, then the
///   supremum over all thresholds.
/// * `ecdf`: empirical CDFs on a `grid_size` threshold grid, clamped.
/// * `discrete`: the unclamped empirical curve at every distinct pooled loss.
pub fn audit_detailed(train: &LossSet, pop: &LossSet, config: &AuditConfig) -> Result<AuditOutcome> {
    config.validate()?;
    let delta = config.delta.resolve(train.len())?;
    let mut outcome = AuditOutcome {
        result: match config.method {
            Method::Ecdf => epsilon_star_ecdf(train.values(), pop.values(), delta, config.grid_size)?,
            Method::Discrete => {
                // levels (i + 0.5) / M with M >= n reach every order statistic
                let grid = 2 * train.len().max(pop.len()).max(1);
                let curve = ecdf_rate_curve(train.values(), pop.values(), grid)?;
                epsilon_star_discrete(&curve, delta)?
            }
            Method::Parametric => {
                let (tr, po) = transform_losses(train, pop, config.alpha_shift)?;
                let (fit_tr, fit_po) = (fit_normal(&tr.values)?, fit_normal(&po.values)?);
                let result = epsilon_star_parametric(&fit_po.into(), &fit_tr.into(), delta)?;
                return Ok(AuditOutcome {
                    result,
                    n_train: train.len(),
                    n_pop: pop.len(),
                    transform: Some(tr.transform),
                    fit_train: Some(fit_tr),
                    fit_pop: Some(fit_po),
                });
            }
        },
        n_train: train.len(),
        n_pop: pop.len(),
        transform: None,
        fit_train: None,
        fit_pop: None,
    };
    outcome.result.delta = delta;
    Ok(outcome)
}

/// [`audit_detailed`] without the intermediate fits.
pub fn epsilon_star_audit(train: &LossSet, pop: &LossSet, config: &AuditConfig) -> Result<EpsilonStarResult> {
    audit_detailed(train, pop, config).map(|o| o.result)
}
