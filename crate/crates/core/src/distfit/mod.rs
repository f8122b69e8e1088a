//! Distribution machinery: empirical CDFs, Normal and Gaussian-mixture fits,
//! and Gamma distributions used as known loss generators.
//!
//! Every distribution exposes both tails directly. Epsilon* is driven by
//! rates very close to 0 and 1, so `sf(x)` is never computed as
//! `1 - cdf(x)` for the continuous families; both tails stay accurate in
//! relative terms down to ~1e-300.

mod empirical;
mod gamma;
mod gmm;
mod normal;
pub mod special;

pub use empirical::{ecdf_eval, EmpiricalDistribution};
pub use gamma::{gamma_cdf, gamma_quantile, sample_gamma, sample_gamma_with, GammaParams};
pub use gmm::{
    fit_gmm_1d, fit_gmm_1d_traced, run_em, EmTrace, GmmComponent, GmmParams, EM_MAX_ITER, EM_RESTARTS,
    EM_TOLERANCE, MAX_COMPONENTS, VARIANCE_FLOOR,
};
pub use normal::{fit_normal, normal_cdf, normal_quantile, NormalParams};

use crate::error::{Error, Result};

/// A distribution that can report both tails and invert them.
#[derive(Debug, Clone, PartialEq)]
pub enum FittedDistribution {
    Empirical(EmpiricalDistribution),
    Normal(NormalParams),
    Gmm(GmmParams),
    Gamma(GammaParams),
}

impl FittedDistribution {
    pub fn is_continuous(&self) -> bool {
        !matches!(self, FittedDistribution::Empirical(_))
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            FittedDistribution::Empirical(d) => d.cdf(x),
            FittedDistribution::Normal(p) => normal_cdf(x, p),
            FittedDistribution::Gmm(p) => p.cdf(x),
            FittedDistribution::Gamma(p) => gamma_cdf(x, p),
        }
    }

    /// Upper tail `P(X > x)`.
    pub fn sf(&self, x: f64) -> f64 {
        match self {
            FittedDistribution::Empirical(d) => d.sf(x),
            FittedDistribution::Normal(p) => p.sf(x),
            FittedDistribution::Gmm(p) => p.sf(x),
            FittedDistribution::Gamma(p) => p.sf(x),
        }
    }

    /// Density; `None` for the empirical step function.
    pub fn pdf(&self, x: f64) -> Option<f64> {
        match self {
            FittedDistribution::Empirical(_) => None,
            FittedDistribution::Normal(p) => Some(p.pdf(x)),
            FittedDistribution::Gmm(p) => Some(p.pdf(x)),
            FittedDistribution::Gamma(p) => Some(p.pdf(x)),
        }
    }

    /// Lower-tail inverse, `t` in (0, 1).
    pub fn quantile(&self, t: f64) -> Result<f64> {
        match self {
            FittedDistribution::Empirical(d) => {
                normal::check_open_unit(t)?;
                d.quantile(t)
            }
            FittedDistribution::Normal(p) => normal_quantile(t, p),
            FittedDistribution::Gmm(p) => p.quantile(t),
            FittedDistribution::Gamma(p) => gamma_quantile(t, p),
        }
    }

    /// Upper-tail inverse: `x` with `sf(x) = p`, `p` in (0, 1).
    pub fn quantile_upper(&self, p: f64) -> Result<f64> {
        match self {
            FittedDistribution::Empirical(d) => {
                normal::check_open_unit(p)?;
                d.quantile(1.0 - p)
            }
            FittedDistribution::Normal(n) => n.quantile_upper(p),
            FittedDistribution::Gmm(g) => g.quantile_upper(p),
            FittedDistribution::Gamma(g) => g.quantile_upper(p),
        }
    }

    pub(crate) fn require_continuous(&self, what: &str) -> Result<()> {
        if self.is_continuous() {
            Ok(())
        } else {
            Err(Error::domain(format!("{what} requires a continuous distribution")))
        }
    }
}

impl From<NormalParams> for FittedDistribution {
    fn from(p: NormalParams) -> Self {
        FittedDistribution::Normal(p)
    }
}

impl From<GammaParams> for FittedDistribution {
    fn from(p: GammaParams) -> Self {
        FittedDistribution::Gamma(p)
    }
}

impl From<GmmParams> for FittedDistribution {
    fn from(p: GmmParams) -> Self {
        FittedDistribution::Gmm(p)
    }
}

impl From<EmpiricalDistribution> for FittedDistribution {
    fn from(d: EmpiricalDistribution) -> Self {
        FittedDistribution::Empirical(d)
    }
}
