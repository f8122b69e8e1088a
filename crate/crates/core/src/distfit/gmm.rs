//! One-dimensional Gaussian mixtures fitted by expectation-maximization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::normal::{check_open_unit, fit_normal, NormalParams};
use super::special::{solve_increasing, std_normal_cdf, std_normal_pdf, std_normal_sf};
use crate::error::{Error, Result};

pub const MAX_COMPONENTS: usize = 20;
pub const EM_TOLERANCE: f64 = 1e-8;
pub const EM_MAX_ITER: usize = 500;
pub const EM_RESTARTS: usize = 5;
pub const VARIANCE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GmmComponent {
    pub weight: f64,
    pub mu: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmmParams {
    pub components: Vec<GmmComponent>,
    /// Set when the variance floor was hit during fitting.
    pub floored: bool,
}

impl GmmParams {
    pub fn new(components: Vec<GmmComponent>) -> Result<Self> {
        if components.is_empty() || components.len() > MAX_COMPONENTS {
            return Err(Error::domain(format!(
                "mixture needs 1..={MAX_COMPONENTS} components, got {}",
                components.len()
            )));
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if components.iter().any(|c| !(c.weight > 0.0) || !(c.sigma > 0.0) || !c.mu.is_finite())
            || (total - 1.0).abs() > 1e-9
        {
            return Err(Error::domain("mixture weights must be positive and sum to 1, sigmas positive"));
        }
        Ok(Self { components, floored: false })
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * std_normal_cdf((x - c.mu) / c.sigma))
            .sum()
    }

    pub fn sf(&self, x: f64) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * std_normal_sf((x - c.mu) / c.sigma))
            .sum()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * std_normal_pdf((x - c.mu) / c.sigma) / c.sigma)
            .sum()
    }

    // The mixture t-quantile lies between the smallest and largest component
    // t-quantiles, which seeds the solver.
    fn start(&self, t: f64, upper: bool) -> f64 {
        let qs = self.components.iter().map(|c| {
            let n = NormalParams { mu: c.mu, sigma: c.sigma };
            if upper {
                n.quantile_upper(t).unwrap_or(c.mu)
            } else {
                super::normal::normal_quantile(t, &n).unwrap_or(c.mu)
            }
        });
        let (lo, hi) = qs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), q| (a.min(q), b.max(q)));
        0.5 * (lo + hi)
    }

    pub fn quantile(&self, t: f64) -> Result<f64> {
        check_open_unit(t)?;
        if t > 0.5 {
            return self.quantile_upper(1.0 - t);
        }
        let lt = t.ln();
        let scale = self.spread();
        Ok(solve_increasing(
            |x| {
                let f = self.cdf(x);
                (f.ln() - lt, self.pdf(x) / f)
            },
            self.start(t, false),
            scale,
        ))
    }

    pub fn quantile_upper(&self, p: f64) -> Result<f64> {
        check_open_unit(p)?;
        if p > 0.5 {
            return self.quantile(1.0 - p);
        }
        let lp = p.ln();
        let scale = self.spread();
        Ok(solve_increasing(
            |x| {
                let s = self.sf(x);
                (lp - s.ln(), self.pdf(x) / s)
            },
            self.start(p, true),
            scale,
        ))
    }

    fn spread(&self) -> f64 {
        self.components.iter().map(|c| c.sigma).fold(0.0, f64::max)
    }

    /// Draws `n` values, deterministic in `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cumulative = Vec::with_capacity(self.components.len());
        let mut acc = 0.0;
        for c in &self.components {
            acc += c.weight;
            cumulative.push(acc);
        }
        (0..n)
            .map(|_| {
                let u: f64 = rng.gen::<f64>() * acc;
                let j = cumulative.partition_point(|&c| c <= u).min(self.components.len() - 1);
                let c = &self.components[j];
                let z: f64 = rng.sample(StandardNormal);
                c.mu + c.sigma * z
            })
            .collect()
    }
}

/// Outcome of one EM run, with the per-iteration mean log-likelihood.
#[derive(Debug, Clone)]
pub struct EmTrace {
    pub params: GmmParams,
    pub log_likelihood: Vec<f64>,
    pub converged: bool,
}

impl EmTrace {
    pub fn final_log_likelihood(&self) -> f64 {
        *self.log_likelihood.last().unwrap_or(&f64::NEG_INFINITY)
    }
}

/// Fills `resp` (row-major, one row of `k` per point) with each component's
/// responsibility and returns the mean log-likelihood of `params`.
fn e_step(params: &GmmParams, xs: &[f64], resp: &mut [f64]) -> f64 {
    let k = params.components.len();
    let half_ln_tau = 0.5 * (2.0 * std::f64::consts::PI).ln();
    let terms: Vec<(f64, f64, f64)> = params
        .components
        .iter()
        .map(|c| (c.mu, c.sigma, c.weight.ln() - c.sigma.ln() - half_ln_tau))
        .collect();
    let mut ll = 0.0;
    for (&x, row) in xs.iter().zip(resp.chunks_exact_mut(k)) {
        let mut m = f64::NEG_INFINITY;
        for (r, &(mu, sigma, offset)) in row.iter_mut().zip(&terms) {
            let z = (x - mu) / sigma;
            *r = offset - 0.5 * z * z;
            m = m.max(*r);
        }
        let mut total = 0.0;
        for r in row.iter_mut() {
            *r = (*r - m).exp();
            total += *r;
        }
        for r in row.iter_mut() {
            *r /= total;
        }
        ll += m + total.ln();
    }
    ll / xs.len() as f64
}

/// Runs EM from the given initial mixture until the mean log-likelihood
/// changes by less than [`EM_TOLERANCE`] or [`EM_MAX_ITER`] iterations pass.
pub fn run_em(xs: &[f64], init: GmmParams) -> Result<EmTrace> {
    let k = init.components.len();
    let n = xs.len() as f64;
    let mut params = init;
    let mut resp = vec![0.0; xs.len() * k];
    let mut trace = vec![e_step(&params, xs, &mut resp)];
    let mut converged = false;

    for _ in 0..EM_MAX_ITER {
        let mut nk = vec![0.0; k];
        let mut sx = vec![0.0; k];
        for (&x, row) in xs.iter().zip(resp.chunks_exact(k)) {
            for j in 0..k {
                nk[j] += row[j];
                sx[j] += row[j] * x;
            }
        }
        let means: Vec<f64> = (0..k).map(|j| sx[j] / nk[j]).collect();
        // second pass for centred second moments
        let mut sxx = vec![0.0; k];
        for (&x, row) in xs.iter().zip(resp.chunks_exact(k)) {
            for j in 0..k {
                let d = x - means[j];
                sxx[j] += row[j] * d * d;
            }
        }

        let mut next = Vec::with_capacity(k);
        for j in 0..k {
            if !(nk[j] > 0.0) || !means[j].is_finite() {
                return Err(Error::DegenerateSample(format!(
                    "mixture component {j} lost all responsibility"
                )));
            }
            let mut var = sxx[j] / nk[j];
            if var < VARIANCE_FLOOR {
                var = VARIANCE_FLOOR;
                params.floored = true;
            }
            next.push(GmmComponent {
                weight: nk[j] / n,
                mu: means[j],
                sigma: var.sqrt(),
            });
        }
        params.components = next;
        let ll = e_step(&params, xs, &mut resp);
        let prev = *trace.last().unwrap();
        trace.push(ll);
        if (ll - prev).abs() < EM_TOLERANCE {
            converged = true;
            break;
        }
    }

    if params.components.iter().any(|c| !(c.sigma >= 1e-9)) {
        return Err(Error::DegenerateSample("mixture component collapsed".into()));
    }
    Ok(EmTrace {
        params,
        log_likelihood: trace,
        converged,
    })
}

fn quantile_init(sorted: &[f64], levels: &[f64], sigma: f64) -> GmmParams {
    let k = levels.len();
    let n = sorted.len();
    let components = levels
        .iter()
        .map(|&l| {
            let idx = ((l * n as f64) as usize).min(n - 1);
            GmmComponent {
                weight: 1.0 / k as f64,
                mu: sorted[idx],
                sigma: sigma / k as f64,
            }
        })
        .collect();
    GmmParams { components, floored: false }
}

/// Fits a `n_components` mixture by EM, keeping the best of
/// [`EM_RESTARTS`] runs. The first run starts from equally spaced sample
/// quantiles; later runs jitter those levels with a generator seeded by
/// `seed`.
pub fn fit_gmm_1d(samples: &[f64], n_components: usize, seed: u64) -> Result<GmmParams> {
    Ok(fit_gmm_1d_traced(samples, n_components, seed)?.params)
}

/// As [`fit_gmm_1d`], returning the winning run's log-likelihood trace.
pub fn fit_gmm_1d_traced(samples: &[f64], n_components: usize, seed: u64) -> Result<EmTrace> {
    if !(1..=MAX_COMPONENTS).contains(&n_components) {
        return Err(Error::domain(format!(
            "n_components must lie in 1..={MAX_COMPONENTS}, got {n_components}"
        )));
    }
    if samples.len() < 10 * n_components {
        return Err(Error::InsufficientData(format!(
            "{} samples cannot support {n_components} components (need {})",
            samples.len(),
            10 * n_components
        )));
    }
    let base = fit_normal(samples)?;
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let k = n_components;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<EmTrace> = None;
    let mut last_err = None;
    for restart in 0..EM_RESTARTS {
        let levels: Vec<f64> = (0..k)
            .map(|j| {
                let centre = (j as f64 + 0.5) / k as f64;
                if restart == 0 {
                    centre
                } else {
                    let jitter: f64 = rng.gen_range(-0.5..0.5) / k as f64;
                    (centre + jitter).clamp(0.0, 1.0)
                }
            })
            .collect();
        match run_em(samples, quantile_init(&sorted, &levels, base.sigma)) {
            Ok(trace) => {
                let better = best
                    .as_ref()
                    .map_or(true, |b| trace.final_log_likelihood() > b.final_log_likelihood());
                if better {
                    best = Some(trace);
                }
            }
            Err(e) => last_err = Some(e),
        }
        if k == 1 {
            break;
        }
    }
    best.ok_or_else(|| last_err.unwrap_or_else(|| Error::DegenerateSample("EM failed".into())))
}
