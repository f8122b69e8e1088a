//! Epsilon*: an empirical lower bound on the privacy loss of one trained model
//! instance, computed from the false positive / false negative rates of a
//! loss-threshold membership test.
//!
//! For a threshold `q` on the loss, the false positive rate is
//! `t = P_pop(loss <= q)` and the false negative rate `η = P_train(loss > q)`.
//! Each `(t, η)` pair yields four ratios
//!
//! ```text
//! m1 = (1 - δ - η) / t      m2 = (1 - δ - t) / η
//! m3 = (η - δ) / (1 - t)    m4 = (t - δ) / (1 - η)
//! ```
//!
//! and `ε* = ln max(1, max over pairs and ratios)`. Three variants differ in
//! where the pairs come from: a caller-supplied curve ([`epsilon_star_discrete`]),
//! empirical CDFs of two loss samples ([`epsilon_star_ecdf`]), or a supremum
//! over every threshold of two continuous distributions
//! ([`epsilon_star_parametric`]).

mod audit;
mod curve;
mod ecdf;
mod parametric;

pub use audit::{audit_detailed, epsilon_star_audit, AuditOutcome};
pub use curve::{rate_curve_from_distributions, CurveSource, RateCurve, RatePair};
pub use ecdf::{ecdf_rate_curve, epsilon_star_ecdf, ECDF_CLAMP, DEFAULT_GRID_SIZE};
pub use parametric::{
    branch_log_ratios_at, epsilon_star_parametric, ParametricSearch, SCAN_POINTS, TAIL_FLOOR, Z_TOLERANCE,
};

use serde::{Deserialize, Serialize};

use crate::error::{check_delta, Error, Result};

/// Which of the four ratios (or the unit floor) attained the maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    M1,
    M2,
    M3,
    M4,
    Unit,
}

impl Branch {
    pub const RATIOS: [Branch; 4] = [Branch::M1, Branch::M2, Branch::M3, Branch::M4];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Discrete,
    Ecdf,
    Parametric,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "discrete" => Ok(Method::Discrete),
            "ecdf" => Ok(Method::Ecdf),
            "parametric" => Ok(Method::Parametric),
            other => Err(Error::domain(format!(
                "unknown method `{other}` (expected parametric, ecdf or discrete)"
            ))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(match self {
            Method::Discrete => "discrete",
            Method::Ecdf => "ecdf",
            Method::Parametric => "parametric",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Pairs (or scan points) considered before clamping.
    pub pairs_total: usize,
    /// Pairs dropped because a rate fell outside the clamp window.
    pub pairs_clamped: usize,
    /// Golden-section iterations spent refining the parametric supremum.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refine_iterations: Option<usize>,
    /// Threshold interval searched by the parametric variant.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold_window: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonStarResult {
    pub epsilon_star: f64,
    pub delta: f64,
    pub method: Method,
    pub argmax_branch: Branch,
    pub argmax_t: f64,
    pub clamp_window: (f64, f64),
    pub diagnostics: Diagnostics,
}

/// `ln(num / den)` when both are positive; `None` marks a ratio that cannot
/// exceed the unit floor or has a zero denominator.
#[inline]
pub(crate) fn log_ratio(num: f64, den: f64) -> Option<f64> {
    (num > 0.0 && den > 0.0).then(|| num.ln() - den.ln())
}

/// The four log-ratios for one `(t, η)` pair, in branch order.
pub fn pair_log_ratios(t: f64, eta: f64, delta: f64) -> [Option<f64>; 4] {
    log_ratios_with_complements(t, 1.0 - t, eta, 1.0 - eta, delta)
}

/// As [`pair_log_ratios`], with `1 - t` and `1 - η` supplied by the caller.
/// Callers holding both tails pass them so that no complement is formed by
/// subtraction; identical distributions then give exactly zero.
#[inline]
pub(crate) fn log_ratios_with_complements(t: f64, t_c: f64, eta: f64, eta_c: f64, delta: f64) -> [Option<f64>; 4] {
    [
        log_ratio(eta_c - delta, t),
        log_ratio(t_c - delta, eta),
        log_ratio(eta - delta, t_c),
        log_ratio(t - delta, eta_c),
    ]
}

/// Running maximum over ratio quadruples; strict `>` keeps the first branch
/// and the first pair on ties.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ArgMax {
    pub value: f64,
    pub branch: Branch,
    pub t: f64,
}

impl ArgMax {
    pub fn new(t: f64) -> Self {
        Self {
            value: 0.0,
            branch: Branch::Unit,
            t,
        }
    }

    #[inline]
    pub fn offer(&mut self, t: f64, ratios: [Option<f64>; 4]) {
        for (b, v) in Branch::RATIOS.iter().zip(ratios) {
            if let Some(v) = v {
                if v > self.value {
                    self.value = v;
                    self.branch = *b;
                    self.t = t;
                }
            }
        }
    }
}

/// Maximum over a finite curve of rate pairs.
///
/// Ratios with a zero denominator are skipped rather than treated as an
/// error; the unit floor keeps the result non-negative.
pub fn epsilon_star_discrete(curve: &RateCurve, delta: f64) -> Result<EpsilonStarResult> {
    check_delta(delta)?;
    let pairs = curve.pairs();
    if pairs.is_empty() {
        return Err(Error::EmptyCurve("no rate pairs to maximize over".into()));
    }
    let mut best = ArgMax::new(pairs[0].t);
    for p in pairs {
        best.offer(p.t, pair_log_ratios(p.t, p.eta, delta));
    }
    Ok(EpsilonStarResult {
        epsilon_star: best.value,
        delta,
        method: Method::Discrete,
        argmax_branch: best.branch,
        argmax_t: best.t,
        clamp_window: (0.0, 1.0),
        diagnostics: Diagnostics {
            pairs_total: pairs.len(),
            ..Default::default()
        },
    })
}

/// `1 / (n ln n)` with `n` the training-set size.
pub fn auto_delta(n_train: usize) -> Result<f64> {
    if n_train < 2 {
        return Err(Error::domain(format!(
            "automatic delta needs at least 2 training records, got {n_train}"
        )));
    }
    let n = n_train as f64;
    Ok(1.0 / (n * n.ln()))
}
