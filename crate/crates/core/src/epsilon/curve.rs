use serde::{Deserialize, Serialize};

use crate::distfit::FittedDistribution;
use crate::error::{Error, Result};

/// One threshold's false positive rate `t` and false negative rate `eta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePair {
    pub t: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveSource {
    Ecdf,
    Parametric,
    Oracle,
}

/// Rate pairs ordered by `t`.
///
/// Curves from continuous distributions must have strictly increasing `t` and
/// non-increasing `eta`. Empirical curves only need non-decreasing `t`: step
/// functions can repeat a false positive rate across several thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCurve {
    pairs: Vec<RatePair>,
    pub source: CurveSource,
}

const MONOTONE_SLACK: f64 = 1e-15;

impl RateCurve {
    pub fn new(pairs: Vec<RatePair>, source: CurveSource) -> Result<Self> {
        for p in &pairs {
            if !(0.0..=1.0).contains(&p.t) || !(0.0..=1.0).contains(&p.eta) {
                return Err(Error::domain(format!("rate pair ({}, {}) outside [0, 1]", p.t, p.eta)));
            }
        }
        let strict = source != CurveSource::Ecdf;
        for w in pairs.windows(2) {
            let ordered = if strict { w[1].t > w[0].t } else { w[1].t >= w[0].t };
            if !ordered {
                return Err(Error::domain(format!(
                    "rate curve t values out of order: {} then {}",
                    w[0].t, w[1].t
                )));
            }
            if strict && w[1].eta > w[0].eta + MONOTONE_SLACK {
                return Err(Error::domain(format!(
                    "false negative rate increases from {} to {} along a {source:?} curve",
                    w[0].eta, w[1].eta
                )));
            }
        }
        Ok(Self { pairs, source })
    }

    pub fn pairs(&self) -> &[RatePair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Keeps the pairs whose rates both lie strictly inside `(lo, hi)`;
    /// returns the filtered curve and the number of pairs dropped.
    pub fn clamped(&self, lo: f64, hi: f64) -> (RateCurve, usize) {
        let kept: Vec<RatePair> = self
            .pairs
            .iter()
            .copied()
            .filter(|p| p.t > lo && p.t < hi && p.eta > lo && p.eta < hi)
            .collect();
        let dropped = self.pairs.len() - kept.len();
        (
            RateCurve {
                pairs: kept,
                source: self.source,
            },
            dropped,
        )
    }
}

/// `(t, 1 - F_tr(F_pop⁻¹(t)))` for each level in `t_grid`; the false negative
/// rate is read from the training distribution's upper tail directly.
pub fn rate_curve_from_distributions(
    pop: &FittedDistribution,
    train: &FittedDistribution,
    t_grid: &[f64],
) -> Result<RateCurve> {
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("t grid must be strictly increasing"));
    }
    let pairs = t_grid
        .iter()
        .map(|&t| {
            let q = pop.quantile(t)?;
            Ok(RatePair { t, eta: train.sf(q) })
        })
        .collect::<Result<Vec<_>>>()?;
    let source = match (pop, train) {
        (FittedDistribution::Empirical(_), _) | (_, FittedDistribution::Empirical(_)) => CurveSource::Ecdf,
        (FittedDistribution::Gamma(_), FittedDistribution::Gamma(_)) => CurveSource::Oracle,
        _ => CurveSource::Parametric,
    };
    RateCurve::new(pairs, source)
}
