//! Two-sample Kolmogorov-Smirnov testing and a hold-out check of how well a
//! Gaussian mixture reproduces a loss sample.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distfit::fit_gmm_1d;
use crate::error::{Error, Result};
use crate::seeds::derive_seed;

/// Significance level for [`FitQualityReport::passes_alpha`].
pub const FIT_ALPHA: f64 = 0.05;

const KS_TERMS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic_d: f64,
    pub p_value: f64,
    pub n_a: usize,
    pub n_b: usize,
}

fn sorted(xs: &[f64], which: &str) -> Result<Vec<f64>> {
    if xs.is_empty() {
        return Err(Error::EmptySample(format!("KS sample {which} is empty")));
    }
    if xs.iter().any(|x| x.is_nan()) {
        return Err(Error::domain(format!("KS sample {which} contains NaN")));
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Largest gap between the two empirical CDFs, by a merged sweep.
///
/// At a value present in both samples every copy on both sides is consumed
/// before the gap is measured, so ties never produce a spurious step.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> Result<f64> {
    let (a, b) = (sorted(a, "a")?, sorted(b, "b")?);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    // once one side is exhausted the gap only shrinks toward zero
    Ok(d)
}

/// Survival function of the Kolmogorov distribution, `P(K > λ)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let p = if lambda < 1.18 {
        // Jacobi-transformed series converges fast for small λ
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        let s: f64 = (1..=KS_TERMS)
            .map(|k| {
                let m = (2 * k - 1) as f64;
                (-m * m * pi2 / (8.0 * lambda * lambda)).exp()
            })
            .sum();
        1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s
    } else {
        2.0 * (1..=KS_TERMS)
            .map(|k| {
                let kf = k as f64;
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * kf * kf * lambda * lambda).exp()
            })
            .sum::<f64>()
    };
    p.clamp(0.0, 1.0)
}

/// Two-sample test with the asymptotic p-value at
/// `λ = sqrt(n_a n_b / (n_a + n_b)) · D`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    let d = ks_statistic(a, b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let lambda = (na * nb / (na + nb)).sqrt() * d;
    Ok(KsResult {
        statistic_d: d,
        p_value: kolmogorov_sf(lambda),
        n_a: a.len(),
        n_b: b.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitQualityReport {
    pub n_components: usize,
    pub n_samples: usize,
    pub ks: KsResult,
    pub passes_alpha: bool,
    /// The mixture hit the variance floor during fitting.
    pub floored: bool,
}

/// Holds out `n_samples` losses after a seeded shuffle, fits a mixture to
/// the rest, draws `n_samples` values from it and compares them with the
/// hold-out.
pub fn gmm_fit_quality(losses: &[f64], n_components: usize, n_samples: usize, seed: u64) -> Result<FitQualityReport> {
    if n_samples == 0 || n_samples > losses.len() / 2 {
        return Err(Error::InsufficientData(format!(
            "cannot hold out {n_samples} of {} losses; at most half may be held out",
            losses.len()
        )));
    }
    let mut shuffled = losses.to_vec();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(derive_seed(seed, &[0])));
    let (hold_out, fit_set) = shuffled.split_at(n_samples);
    let gmm = fit_gmm_1d(fit_set, n_components, derive_seed(seed, &[1]))?;
    let draws = gmm.sample(n_samples, derive_seed(seed, &[2]));
    let ks = ks_two_sample(hold_out, &draws)?;
    Ok(FitQualityReport {
        n_components,
        n_samples,
        ks,
        passes_alpha: ks.p_value > FIT_ALPHA,
        floored: gmm.floored,
    })
}

/// [`gmm_fit_quality`] over every `(components, samples)` cell, in that
/// order; each cell's seed is derived from `seed` and its coordinates.
pub fn fit_quality_sweep(
    losses: &[f64],
    components: &[usize],
    sample_sizes: &[usize],
    seed: u64,
) -> Result<Vec<FitQualityReport>> {
    let cells: Vec<(usize, usize)> = components
        .iter()
        .flat_map(|&k| sample_sizes.iter().map(move |&n| (k, n)))
        .collect();
    cells
        .par_iter()
        .map(|&(k, n)| gmm_fit_quality(losses, k, n, derive_seed(seed, &[k as u64, n as u64])))
        .collect()
}

/// CSV with header `n_components,n_samples,d,p_value,passes`.
pub fn sweep_to_csv(reports: &[FitQualityReport]) -> String {
    let mut out = String::from("n_components,n_samples,d,p_value,passes\n");
    for r in reports {
        out.push_str(&format!(
            "{},{},{:.16e},{:.16e},{}\n",
            r.n_components, r.n_samples, r.ks.statistic_d, r.ks.p_value, r.passes_alpha
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distfit::{GmmComponent, GmmParams};

    fn brute_d(a: &[f64], b: &[f64]) -> f64 {
        let cdf = |xs: &[f64], x: f64| xs.iter().filter(|&&v| v <= x).count() as f64 / xs.len() as f64;
        a.iter().chain(b).map(|&x| (cdf(a, x) - cdf(b, x)).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn hand_examples() {
        let r = ks_two_sample(&[1.0, 2.0, 3.0], &[1.5, 2.5, 3.5]).unwrap();
        assert!((r.statistic_d - 1.0 / 3.0).abs() < 1e-15);
        let same = [3.0, 1.0, 2.0, 2.0];
        let r = ks_two_sample(&same, &[2.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!(r.statistic_d, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(ks_two_sample(&[0.0, 1.0], &[5.0, 6.0, 7.0]).unwrap().statistic_d, 1.0);
        assert!(matches!(ks_two_sample(&[], &[1.0]), Err(Error::EmptySample(_))));
    }

    #[test]
    fn ties_across_samples() {
        let a = [1.0, 1.0, 2.0, 3.0];
        let b = [1.0, 2.0, 2.0, 2.0, 4.0];
        assert_eq!(ks_statistic(&a, &b).unwrap(), brute_d(&a, &b));
    }

    #[test]
    fn kolmogorov_reference_points() {
        // P(K > 1.3581) ≈ 0.05 and P(K > 1.2238) ≈ 0.10, the classical critical values
        assert!((kolmogorov_sf(1.358_098_8) - 0.05).abs() < 1e-6);
        assert!((kolmogorov_sf(1.223_847_9) - 0.10).abs() < 1e-6);
        // the two series agree where they switch
        let lo = 1.0 - (2.0 * std::f64::consts::PI).sqrt() / 1.18
            * (1..=100)
                .map(|k| (-((2 * k - 1) as f64).powi(2) * std::f64::consts::PI.powi(2) / (8.0 * 1.18 * 1.18)).exp())
                .sum::<f64>();
        assert!((kolmogorov_sf(1.18) - lo).abs() < 1e-12);
        assert_eq!(kolmogorov_sf(0.0), 1.0);
        assert!(kolmogorov_sf(10.0) < 1e-80);
    }

    #[test]
    fn fit_quality_under_the_null() {
        let truth = GmmParams::new(vec![GmmComponent { weight: 1.0, mu: 2.0, sigma: 0.5 }]).unwrap();
        let losses = truth.sample(5000, 9);
        let r = gmm_fit_quality(&losses, 1, 500, 3).unwrap();
        assert_eq!(r.passes_alpha, r.ks.p_value > FIT_ALPHA);
        assert_eq!(r, gmm_fit_quality(&losses, 1, 500, 3).unwrap());
        assert!(matches!(gmm_fit_quality(&losses, 1, 2501, 3), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn sweep_csv_has_one_row_per_cell() {
        let truth = GmmParams::new(vec![GmmComponent { weight: 1.0, mu: 0.0, sigma: 1.0 }]).unwrap();
        let losses = truth.sample(2000, 1);
        let reps = fit_quality_sweep(&losses, &[1, 2, 3], &[100, 200], 5).unwrap();
        let csv = sweep_to_csv(&reps);
        assert_eq!(csv.lines().count(), 7);
        assert!(reps.iter().all(|r| (0.0..=1.0).contains(&r.ks.p_value)));
        assert_eq!(reps[1].n_components, 1);
        assert_eq!(reps[1].n_samples, 200);
    }
}
