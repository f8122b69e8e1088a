use crate::distfit::EmpiricalDistribution;
use crate::error::{check_delta, Error, Result};

use super::curve::{CurveSource, RateCurve, RatePair};
use super::{log_ratios_with_complements, ArgMax, Diagnostics, EpsilonStarResult, Method};

/// Open interval both rates must fall in for a pair to be kept.
pub const ECDF_CLAMP: (f64, f64) = (0.001, 0.999);

/// Total thresholds: half from each sample's quantile grid.
pub const DEFAULT_GRID_SIZE: usize = 2_000_000;

/// Threshold with the exact counts behind its two rates.
struct CountedPair {
    pop_le: usize,
    train_le: usize,
}

fn thresholds(train: &EmpiricalDistribution, pop: &EmpiricalDistribution, grid_size: usize) -> Result<Vec<f64>> {
    if grid_size < 2 {
        return Err(Error::domain(format!("grid_size must be at least 2, got {grid_size}")));
    }
    let levels = grid_size / 2;
    let mut taus = Vec::with_capacity(2 * levels);
    for d in [train, pop] {
        for i in 0..levels {
            taus.push(d.quantile((i as f64 + 0.5) / levels as f64)?);
        }
    }
    taus.sort_by(f64::total_cmp);
    taus.dedup();
    Ok(taus)
}

fn counted_pairs(train: &[f64], pop: &[f64], grid_size: usize) -> Result<(Vec<CountedPair>, usize, usize)> {
    let tr = EmpiricalDistribution::new(train.to_vec())?;
    let po = EmpiricalDistribution::new(pop.to_vec())?;
    let pairs = thresholds(&tr, &po, grid_size)?
        .into_iter()
        .map(|tau| CountedPair {
            pop_le: po.count_le(tau),
            train_le: tr.count_le(tau),
        })
        .collect();
    Ok((pairs, tr.n(), po.n()))
}

/// Unclamped curve `t = F̂_pop(τ)`, `η = 1 - F̂_tr(τ)` over thresholds `τ` at
/// `grid_size / 2` equally spaced quantile levels of each sample.
pub fn ecdf_rate_curve(train: &[f64], pop: &[f64], grid_size: usize) -> Result<RateCurve> {
    let (pairs, n_tr, n_pop) = counted_pairs(train, pop, grid_size)?;
    let pairs = pairs
        .iter()
        .map(|c| RatePair {
            t: c.pop_le as f64 / n_pop as f64,
            eta: (n_tr - c.train_le) as f64 / n_tr as f64,
        })
        .collect();
    RateCurve::new(pairs, CurveSource::Ecdf)
}

/// Epsilon* from the empirical CDFs of two loss samples, keeping only pairs
/// whose rates both lie in [`ECDF_CLAMP`].
///
/// Complements are formed from counts, so identical samples give exactly 0.
pub fn epsilon_star_ecdf(train: &[f64], pop: &[f64], delta: f64, grid_size: usize) -> Result<EpsilonStarResult> {
    check_delta(delta)?;
    if train.is_empty() || pop.is_empty() {
        return Err(Error::EmptySample("ecdf epsilon* needs non-empty training and population losses".into()));
    }
    let (pairs, n_tr, n_pop) = counted_pairs(train, pop, grid_size)?;
    let (lo, hi) = ECDF_CLAMP;
    let (ntr, npop) = (n_tr as f64, n_pop as f64);
    let mut best: Option<ArgMax> = None;
    let mut kept = 0;
    for c in &pairs {
        let t = c.pop_le as f64 / npop;
        let t_c = (n_pop - c.pop_le) as f64 / npop;
        let eta = (n_tr - c.train_le) as f64 / ntr;
        let eta_c = c.train_le as f64 / ntr;
        if !(t > lo && t < hi && eta > lo && eta < hi) {
            continue;
        }
        kept += 1;
        best.get_or_insert_with(|| ArgMax::new(t))
            .offer(t, log_ratios_with_complements(t, t_c, eta, eta_c, delta));
    }
    let best = best.ok_or_else(|| {
        Error::EmptyCurve(format!(
            "all {} rate pairs fall outside ({lo}, {hi}); samples too small or fully separated",
            pairs.len()
        ))
    })?;
    Ok(EpsilonStarResult {
        epsilon_star: best.value,
        delta,
        method: Method::Ecdf,
        argmax_branch: best.branch,
        argmax_t: best.t,
        clamp_window: ECDF_CLAMP,
        diagnostics: Diagnostics {
            pairs_total: pairs.len(),
            pairs_clamped: pairs.len() - kept,
            ..Default::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distfit::{sample_gamma, GammaParams};

    #[test]
    fn same_sample_gives_zero() {
        let xs = sample_gamma(&GammaParams::new(2.0, 5.0).unwrap(), 5000, 11);
        for delta in [0.0, 1e-5] {
            let r = epsilon_star_ecdf(&xs, &xs, delta, 20_000).unwrap();
            assert_eq!(r.epsilon_star, 0.0);
        }
    }

    #[test]
    fn independent_draws_give_small_positive_value() {
        let g = GammaParams::new(2.0, 5.0).unwrap();
        let a = sample_gamma(&g, 10_000, 1);
        let b = sample_gamma(&g, 10_000, 2);
        let r = epsilon_star_ecdf(&a, &b, 1e-5, 200_000).unwrap();
        assert!(r.epsilon_star > 0.0 && r.epsilon_star < 1.0, "{}", r.epsilon_star);
        assert!(r.argmax_t > ECDF_CLAMP.0 && r.argmax_t < ECDF_CLAMP.1);
    }

    #[test]
    fn hand_computed_small_samples() {
        // pop = 1..=1000, train = 501..=1500 shifted by half the range
        let pop: Vec<f64> = (1..=1000).map(f64::from).collect();
        let train: Vec<f64> = (501..=1500).map(f64::from).collect();
        let r = epsilon_star_ecdf(&train, &pop, 0.0, 4000).unwrap();
        // thresholds are the integers; at τ = k the kept pairs are
        // t = k/1000, η = (1500-k)/1000 for 502 <= k <= 998. m4 = k/(k-500)
        // peaks at k = 502 and m3 = (1500-k)/(1000-k) at k = 998, both 251;
        // the first one scanned wins.
        assert!((r.epsilon_star - 251f64.ln()).abs() < 1e-12);
        assert_eq!(r.argmax_branch, super::super::Branch::M4);
        assert_eq!(r.argmax_t, 0.502);
        assert_eq!(r.diagnostics.pairs_total, 1500);
        assert_eq!(r.diagnostics.pairs_clamped, 1500 - 497);
    }

    #[test]
    fn curve_is_ordered_and_unclamped() {
        let pop: Vec<f64> = (0..100).map(f64::from).collect();
        let train: Vec<f64> = (50..150).map(f64::from).collect();
        let c = ecdf_rate_curve(&train, &pop, 400).unwrap();
        assert!(c.pairs().windows(2).all(|w| w[1].t >= w[0].t && w[1].eta <= w[0].eta));
        assert_eq!(c.pairs().first().unwrap().eta, 1.0);
        assert_eq!(c.pairs().last().unwrap().t, 1.0);
    }

    #[test]
    fn fully_separated_samples_clamp_to_nothing() {
        let pop: Vec<f64> = (0..100).map(f64::from).collect();
        let train: Vec<f64> = (1000..1100).map(f64::from).collect();
        assert!(matches!(epsilon_star_ecdf(&train, &pop, 0.0, 400), Err(Error::EmptyCurve(_))));
        assert!(matches!(epsilon_star_ecdf(&[], &pop, 0.0, 400), Err(Error::EmptySample(_))));
        assert!(epsilon_star_ecdf(&pop, &pop, 0.0, 1).is_err());
    }
}
