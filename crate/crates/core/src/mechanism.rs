//! Mechanism-level lower bound ε̄ from false negative rates averaged over an
//! ensemble of model instances, and the Jensen relation
//! `ε̄ <= ln mean(exp(ε*_j))` between ε̄ and the per-instance values.
//!
//! All instances share one `t` grid. The default grid stays inside
//! `[0.001, 0.999]`, away from the zero denominators the discrete formula
//! skips; a skipped ratio is not convex in `η` and could break the relation.

use serde::{Deserialize, Serialize};

use crate::distfit::{fit_normal, FittedDistribution};
use crate::epsilon::{epsilon_star_discrete, rate_curve_from_distributions, CurveSource, RateCurve, RatePair};
use crate::error::{check_delta, Error, Result};
use crate::loss_model::{transform_losses, LossSet};

/// Slack in the Jensen comparison for rounding in the log-mean-exp.
pub const JENSEN_SLACK: f64 = 1e-9;

const PAIRWISE_BLOCK: usize = 8;

/// Pairwise (cascade) summation: error grows as `O(log n)` and the result
/// depends only on the input order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= PAIRWISE_BLOCK {
        xs.iter().sum()
    } else {
        let (a, b) = xs.split_at(xs.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleRates {
    t_grid: Vec<f64>,
    per_model_fnr: Vec<Vec<f64>>,
    mean_fnr: Vec<f64>,
}

impl EnsembleRates {
    /// Rows are model instances, columns follow `t_grid`.
    pub fn new(t_grid: Vec<f64>, per_model_fnr: Vec<Vec<f64>>) -> Result<Self> {
        if per_model_fnr.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        if t_grid.is_empty() || t_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("ensemble t grid must be non-empty and strictly increasing"));
        }
        if t_grid.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(Error::domain("ensemble t grid must lie in [0, 1]"));
        }
        for (j, row) in per_model_fnr.iter().enumerate() {
            if row.len() != t_grid.len() {
                return Err(Error::domain(format!(
                    "model row {j} has {} rates for a {}-point grid",
                    row.len(),
                    t_grid.len()
                )));
            }
            if row.iter().any(|e| !(0.0..=1.0).contains(e)) {
                return Err(Error::domain(format!("model row {j} has a rate outside [0, 1]")));
            }
        }
        let m = per_model_fnr.len() as f64;
        let mut column = Vec::with_capacity(per_model_fnr.len());
        let mean_fnr = (0..t_grid.len())
            .map(|i| {
                column.clear();
                column.extend(per_model_fnr.iter().map(|r| r[i]));
                pairwise_sum(&column) / m
            })
            .collect();
        Ok(Self {
            t_grid,
            per_model_fnr,
            mean_fnr,
        })
    }

    /// One row per `(population, training)` distribution pair.
    pub fn from_distributions(t_grid: Vec<f64>, models: &[(FittedDistribution, FittedDistribution)]) -> Result<Self> {
        let rows = models
            .iter()
            .map(|(pop, train)| {
                let curve = rate_curve_from_distributions(pop, train, &t_grid)?;
                Ok(curve.pairs().iter().map(|p| p.eta).collect())
            })
            .collect::<Result<Vec<Vec<f64>>>>()?;
        Self::new(t_grid, rows)
    }

    /// Rows from loss files through the audit pipeline: joint transform and
    /// a Normal fit per set, evaluated on the shared grid.
    pub fn from_loss_sets(t_grid: Vec<f64>, models: &[(LossSet, LossSet)], alpha: f64) -> Result<Self> {
        let fitted = models
            .iter()
            .map(|(train, pop)| {
                let (tr, po) = transform_losses(train, pop, alpha)?;
                Ok((fit_normal(&po.values)?.into(), fit_normal(&tr.values)?.into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_distributions(t_grid, &fitted)
    }

    pub fn t_grid(&self) -> &[f64] {
        &self.t_grid
    }

    pub fn per_model_fnr(&self) -> &[Vec<f64>] {
        &self.per_model_fnr
    }

    pub fn mean_fnr(&self) -> &[f64] {
        &self.mean_fnr
    }

    pub fn n_models(&self) -> usize {
        self.per_model_fnr.len()
    }

    fn curve(&self, etas: &[f64]) -> Result<RateCurve> {
        let pairs = self.t_grid.iter().zip(etas).map(|(&t, &eta)| RatePair { t, eta }).collect();
        RateCurve::new(pairs, CurveSource::Ecdf)
    }
}

/// `n` levels uniform in `logit(t)` between 0.001 and 0.999.
pub fn default_t_grid(n: usize) -> Vec<f64> {
    let (lo, hi) = (0.001f64, 0.999f64);
    let (zl, zh) = ((lo / (1.0 - lo)).ln(), (hi / (1.0 - hi)).ln());
    (0..n)
        .map(|i| {
            let z = if n == 1 { 0.0 } else { zl + (zh - zl) * i as f64 / (n - 1) as f64 };
            1.0 / (1.0 + (-z).exp())
        })
        .collect()
}

/// The discrete formula at `(t_i, mean η_i)`.
pub fn epsilon_bar(ensemble: &EnsembleRates, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok(epsilon_star_discrete(&ensemble.curve(ensemble.mean_fnr())?, delta)?.epsilon_star)
}

/// The discrete formula for each row on the shared grid.
pub fn per_model_epsilon(ensemble: &EnsembleRates, delta: f64) -> Result<Vec<f64>> {
    ensemble
        .per_model_fnr()
        .iter()
        .map(|row| Ok(epsilon_star_discrete(&ensemble.curve(row)?, delta)?.epsilon_star))
        .collect()
}

/// `ln mean(exp(ε*_j))`, shifted by the maximum so large values do not overflow.
pub fn log_mean_exp(xs: &[f64]) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let shifted: Vec<f64> = xs.iter().map(|x| (x - m).exp()).collect();
    Ok(m + (pairwise_sum(&shifted) / xs.len() as f64).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JensenCheck {
    pub bound: f64,
    pub holds: bool,
}

pub fn jensen_check(per_model_eps: &[f64], eps_bar: f64) -> Result<JensenCheck> {
    let bound = log_mean_exp(per_model_eps)?;
    Ok(JensenCheck {
        bound,
        holds: eps_bar <= bound + JENSEN_SLACK,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MechanismReport {
    pub delta: f64,
    pub n_models: usize,
    pub epsilon_bar: f64,
    pub per_model_epsilon: Vec<f64>,
    pub jensen_bound: f64,
    pub holds: bool,
}

/// ε̄, the per-instance values and the Jensen comparison in one pass.
pub fn mechanism_audit(ensemble: &EnsembleRates, delta: f64) -> Result<MechanismReport> {
    let eps_bar = epsilon_bar(ensemble, delta)?;
    let per_model = per_model_epsilon(ensemble, delta)?;
    let check = jensen_check(&per_model, eps_bar)?;
    Ok(MechanismReport {
        delta,
        n_models: ensemble.n_models(),
        epsilon_bar: eps_bar,
        per_model_epsilon: per_model,
        jensen_bound: check.bound,
        holds: check.holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distfit::{sample_gamma, GammaParams, NormalParams};
    use proptest::prelude::*;

    #[test]
    fn one_row_matches_discrete() {
        let grid = default_t_grid(200);
        let pop: FittedDistribution = NormalParams::new(1.0, 1.0).unwrap().into();
        let train: FittedDistribution = NormalParams::standard().into();
        let e = EnsembleRates::from_distributions(grid.clone(), &[(pop.clone(), train.clone())]).unwrap();
        let direct = epsilon_star_discrete(&rate_curve_from_distributions(&pop, &train, &grid).unwrap(), 1e-5).unwrap();
        let r = mechanism_audit(&e, 1e-5).unwrap();
        assert_eq!(r.epsilon_bar, direct.epsilon_star);
        assert!((r.jensen_bound - r.epsilon_bar).abs() < 1e-12);
        assert!(r.holds);
    }

    #[test]
    fn opposite_offsets_average_to_zero() {
        // η = 1 - t ± c average back to 1 - t
        let grid: Vec<f64> = (1..64).map(|i| i as f64 / 64.0).collect();
        let c = 1.0 / 256.0;
        let up = grid.iter().map(|t| (1.0 - t + c).min(1.0)).collect();
        let down = grid.iter().map(|t| (1.0 - t - c).max(0.0)).collect();
        let e = EnsembleRates::new(grid, vec![up, down]).unwrap();
        assert_eq!(epsilon_bar(&e, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(EnsembleRates::new(vec![0.5], vec![]), Err(Error::EmptyEnsemble)));
        assert!(EnsembleRates::new(vec![0.5], vec![vec![0.1, 0.2]]).is_err());
        assert!(EnsembleRates::new(vec![0.5], vec![vec![1.5]]).is_err());
        assert!(matches!(jensen_check(&[], 0.0), Err(Error::EmptyEnsemble)));
    }

    #[test]
    fn jensen_examples() {
        let j = jensen_check(&[0.0, 0.0], 0.0).unwrap();
        assert_eq!(j.bound, 0.0);
        assert!(j.holds);
        let j = jensen_check(&[800.0, 800.0], 800.0).unwrap();
        assert_eq!(j.bound, 800.0);
    }

    #[test]
    fn loss_set_ensemble_respects_bound_and_max() {
        let grid = default_t_grid(500);
        let models: Vec<(LossSet, LossSet)> = (0..10)
            .map(|j| {
                let tr = sample_gamma(&GammaParams::new(2.0, 5.0).unwrap(), 2000, 100 + j);
                let po = sample_gamma(&GammaParams::new(3.0, 5.0).unwrap(), 2000, 200 + j);
                (LossSet::training(tr).unwrap(), LossSet::population(po).unwrap())
            })
            .collect();
        let e = EnsembleRates::from_loss_sets(grid, &models, 1.0).unwrap();
        let r = mechanism_audit(&e, 1e-4).unwrap();
        assert!(r.holds);
        let max = r.per_model_epsilon.iter().copied().fold(0.0, f64::max);
        assert!(r.epsilon_bar <= max + 1e-12);
    }

    #[test]
    fn pairwise_sum_is_accurate() {
        let xs = vec![0.1; 1_000_000];
        assert!((pairwise_sum(&xs) - 100_000.0).abs() < 1e-8);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    proptest! {
        #[test]
        fn row_permutation_and_identical_rows(seed in 0u64..1000, m in 1usize..6) {
            let grid = default_t_grid(50);
            let rows: Vec<Vec<f64>> = (0..m)
                .map(|j| {
                    let s = crate::seeds::derive_seed(seed, &[j as u64]);
                    let mu = (s % 1000) as f64 / 400.0;
                    let pop: FittedDistribution = NormalParams::new(mu, 1.0).unwrap().into();
                    let train: FittedDistribution = NormalParams::standard().into();
                    rate_curve_from_distributions(&pop, &train, &grid).unwrap().pairs().iter().map(|p| p.eta).collect()
                })
                .collect();
            let e = EnsembleRates::new(grid.clone(), rows.clone()).unwrap();
            let mut rev = rows.clone();
            rev.reverse();
            let r = EnsembleRates::new(grid.clone(), rev).unwrap();
            let (a, b) = (epsilon_bar(&e, 1e-5).unwrap(), epsilon_bar(&r, 1e-5).unwrap());
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
            let same = EnsembleRates::new(grid, vec![rows[0].clone(); m]).unwrap();
            let per = per_model_epsilon(&same, 1e-5).unwrap();
            prop_assert!((epsilon_bar(&same, 1e-5).unwrap() - per[0]).abs() <= 1e-12 * per[0].max(1.0));
        }
    }
}
