//! Gamma distributions with shape `k` and scale `θ`, used as known loss
//! generators in the simulation harness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::normal::check_open_unit;
use super::special::{gamma_p, gamma_q, ln_gamma, solve_increasing, std_normal_quantile};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaParams {
    pub shape_k: f64,
    pub scale_theta: f64,
}

impl GammaParams {
    pub fn new(shape_k: f64, scale_theta: f64) -> Result<Self> {
        if !(shape_k > 0.0 && shape_k.is_finite() && scale_theta > 0.0 && scale_theta.is_finite()) {
            return Err(Error::domain(format!(
                "gamma parameters must be positive, got k={shape_k}, theta={scale_theta}"
            )));
        }
        Ok(Self { shape_k, scale_theta })
    }

    pub fn mean(&self) -> f64 {
        self.shape_k * self.scale_theta
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let k = self.shape_k;
        let z = x / self.scale_theta;
        ((k - 1.0) * z.ln() - z - ln_gamma(k)).exp() / self.scale_theta
    }

    pub fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            1.0
        } else {
            gamma_q(self.shape_k, x / self.scale_theta)
        }
    }

    // Wilson-Hilferty starting point, in units of θ.
    fn start(&self, t: f64) -> f64 {
        let k = self.shape_k;
        let h = 1.0 / (9.0 * k);
        let z = std_normal_quantile(t.clamp(1e-300, 1.0 - 1e-16));
        let w = 1.0 - h + z * h.sqrt();
        if w > 0.0 {
            (k * w * w * w).max(1e-300)
        } else {
            k.min(1.0) * 1e-3
        }
    }

    // Solve in y = ln(x / θ): ln P is close to linear in y near zero and
    // ln Q close to linear in x far out, so Newton on y behaves at both ends.
    fn solve_lower(&self, t: f64) -> f64 {
        let k = self.shape_k;
        let lt = t.ln();
        let y0 = self.start(t).ln();
        let y = solve_increasing(
            |y| {
                let z = y.exp();
                let p = gamma_p(k, z);
                let dens = ((k - 1.0) * y - z - ln_gamma(k)).exp();
                (p.ln() - lt, z * dens / p)
            },
            y0,
            1.0,
        );
        y.exp() * self.scale_theta
    }

    fn solve_upper(&self, p: f64) -> f64 {
        let k = self.shape_k;
        let lp = p.ln();
        let y0 = self.start(1.0 - p).ln();
        let y = solve_increasing(
            |y| {
                let z = y.exp();
                let q = gamma_q(k, z);
                let dens = ((k - 1.0) * y - z - ln_gamma(k)).exp();
                (lp - q.ln(), z * dens / q)
            },
            y0,
            1.0,
        );
        y.exp() * self.scale_theta
    }

    /// x with `sf(x) = p`, accurate for tiny `p`.
    pub fn quantile_upper(&self, p: f64) -> Result<f64> {
        check_open_unit(p)?;
        Ok(if p < 0.5 { self.solve_upper(p) } else { self.solve_lower(1.0 - p) })
    }
}

/// Regularized lower incomplete gamma `P(k, x/θ)`; zero for `x < 0`.
pub fn gamma_cdf(x: f64, p: &GammaParams) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        gamma_p(p.shape_k, x / p.scale_theta)
    }
}

/// Inverse of [`gamma_cdf`] by bracketed Newton/bisection.
pub fn gamma_quantile(t: f64, p: &GammaParams) -> Result<f64> {
    check_open_unit(t)?;
    Ok(if t <= 0.5 { p.solve_lower(t) } else { p.solve_upper(1.0 - t) })
}

/// Draws one Γ(k, 1) variate by Marsaglia and Tsang's squeeze method.
/// Shapes below one are boosted to `k + 1` and scaled by `U^{1/k}`.
fn standard_gamma<R: Rng + ?Sized>(k: f64, rng: &mut R) -> f64 {
    if k < 1.0 {
        let u: f64 = 1.0 - rng.gen::<f64>();
        return standard_gamma(k + 1.0, rng) * u.powf(1.0 / k);
    }
    let d = k - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x: f64 = rng.sample(StandardNormal);
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u: f64 = 1.0 - rng.gen::<f64>();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 {
            return d * v;
        }
        if u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// Draws from an existing generator.
pub fn sample_gamma_with<R: Rng + ?Sized>(p: &GammaParams, n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| p.scale_theta * standard_gamma(p.shape_k, rng)).collect()
}

/// `n` i.i.d. draws, deterministic in `seed`.
pub fn sample_gamma(p: &GammaParams, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_gamma_with(p, n, &mut rng)
}
