use serde::{Deserialize, Serialize};

use super::special::{std_normal_cdf, std_normal_pdf, std_normal_quantile, std_normal_quantile_lower, std_normal_sf};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalParams {
    pub mu: f64,
    pub sigma: f64,
}

impl NormalParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() || !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::domain(format!("invalid normal parameters mu={mu}, sigma={sigma}")));
        }
        Ok(Self { mu, sigma })
    }

    pub fn standard() -> Self {
        Self { mu: 0.0, sigma: 1.0 }
    }

    fn z(&self, x: f64) -> f64 {
        (x - self.mu) / self.sigma
    }

    pub fn pdf(&self, x: f64) -> f64 {
        std_normal_pdf(self.z(x)) / self.sigma
    }

    pub fn sf(&self, x: f64) -> f64 {
        std_normal_sf(self.z(x))
    }

    /// x with `sf(x) = p`, accurate for tiny `p`.
    pub fn quantile_upper(&self, p: f64) -> Result<f64> {
        check_open_unit(p)?;
        let z = if p <= 0.5 {
            -std_normal_quantile_lower(p)
        } else {
            -std_normal_quantile(p)
        };
        Ok(self.mu + self.sigma * z)
    }
}

pub(crate) fn check_open_unit(t: f64) -> Result<()> {
    if t > 0.0 && t < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("probability must lie in (0, 1), got {t}")))
    }
}

/// Φ((x - μ)/σ) through the complementary error function.
pub fn normal_cdf(x: f64, p: &NormalParams) -> f64 {
    std_normal_cdf(p.z(x))
}

/// Inverse of [`normal_cdf`] for `t` in (0, 1).
pub fn normal_quantile(t: f64, p: &NormalParams) -> Result<f64> {
    check_open_unit(t)?;
    Ok(p.mu + p.sigma * std_normal_quantile(t))
}

/// Maximum-likelihood Normal fit: sample mean and the divide-by-n standard
/// deviation.
pub fn fit_normal(samples: &[f64]) -> Result<NormalParams> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::DegenerateSample(format!("normal fit needs at least 2 samples, got {n}")));
    }
    let nf = n as f64;
    let mu = samples.iter().sum::<f64>() / nf;
    let var = samples.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / nf;
    if !(var > 0.0) || !var.is_finite() {
        return Err(Error::DegenerateSample(format!("sample variance is {var}")));
    }
    Ok(NormalParams { mu, sigma: var.sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn fit_normal_by_hand() {
        let p = fit_normal(&[1.0, 2.0, 3.0]).unwrap();
        assert!((p.mu - 2.0).abs() < 1e-15);
        assert!((p.sigma - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(matches!(fit_normal(&[4.0, 4.0, 4.0]), Err(Error::DegenerateSample(_))));
        assert!(matches!(fit_normal(&[4.0]), Err(Error::DegenerateSample(_))));
    }

    #[test]
    fn fit_normal_recovers_standard_normal() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let xs: Vec<f64> = (0..100_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let p = fit_normal(&xs).unwrap();
        assert!(p.mu.abs() < 0.02, "{p:?}");
        assert!((p.sigma - 1.0).abs() < 0.02, "{p:?}");
    }

    #[test]
    fn cdf_reference_values() {
        let s = NormalParams::standard();
        assert_eq!(normal_cdf(0.0, &s), 0.5);
        assert!((normal_cdf(1.0, &s) - 0.841_344_746_068_542_9).abs() < 1e-15);
        assert!((normal_quantile(0.5, &s).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn quantile_rejects_non_probabilities() {
        let s = NormalParams::standard();
        for t in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(normal_quantile(t, &s).is_err());
        }
    }

    #[test]
    fn upper_quantile_inverts_sf_in_the_far_tail() {
        let p = NormalParams::new(3.0, 2.0).unwrap();
        for &q in &[1e-300, 1e-100, 1e-12, 0.3, 0.9] {
            let x = p.quantile_upper(q).unwrap();
            let rel = (p.sf(x) - q).abs() / q;
            assert!(rel < 1e-12, "q={q} rel={rel}");
        }
    }
}
