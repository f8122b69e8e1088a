//! Monte-Carlo validation against known Gamma loss generators.
//!
//! Training losses follow `Γ(k1, θ1)` and population losses `Γ(k1 + d, θ1)`.
//! Each `(d, n, repeat)` cell draws one pair of samples and scores it three
//! ways: the exact generating CDFs (`true_cdf`), empirical CDFs (`ecdf`) and
//! Normal fits after the logit transform (`parametric`). The two sampled
//! methods see the same draws within a cell.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distfit::{fit_normal, sample_gamma, FittedDistribution, GammaParams};
use crate::epsilon::{epsilon_star_ecdf, epsilon_star_parametric, DEFAULT_GRID_SIZE};
use crate::error::{check_delta, Error, Result};
use crate::loss_model::{transform_losses, LossSet, DEFAULT_ALPHA};
use crate::mechanism::pairwise_sum;
use crate::seeds::derive_seed;
use crate::svg::Plot;

/// Thresholds per loss for the ecdf method below the full grid.
pub const ECDF_GRID_PER_SAMPLE: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub k1: f64,
    pub theta1: f64,
    pub d_values: Vec<f64>,
    pub n_values: Vec<usize>,
    pub repeats: usize,
    pub delta: f64,
    pub seed: u64,
    /// Upper limit on the ecdf grid; the grid is `min(cap, 200 n)`.
    pub ecdf_grid_cap: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            k1: 2.0,
            theta1: 5.0,
            d_values: vec![0.0, 1.0, 2.0, 3.0],
            n_values: vec![1_000, 10_000, 100_000],
            repeats: 10,
            delta: 1e-5,
            seed: 0,
            ecdf_grid_cap: DEFAULT_GRID_SIZE,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        GammaParams::new(self.k1, self.theta1)?;
        check_delta(self.delta)?;
        if self.d_values.is_empty() || self.n_values.is_empty() || self.repeats == 0 {
            return Err(Error::domain("simulation needs at least one d, one n and one repeat"));
        }
        if self.d_values.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::domain("shape offsets d must be finite and >= 0"));
        }
        if self.n_values.iter().any(|&n| n < 2) {
            return Err(Error::domain("sample sizes must be at least 2"));
        }
        if self.ecdf_grid_cap < 2 {
            return Err(Error::domain("ecdf grid cap must be at least 2"));
        }
        Ok(())
    }

    pub fn ecdf_grid(&self, n: usize) -> usize {
        self.ecdf_grid_cap.min(ECDF_GRID_PER_SAMPLE.saturating_mul(n))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimMethod {
    TrueCdf,
    Ecdf,
    Parametric,
}

impl SimMethod {
    pub const ALL: [SimMethod; 3] = [SimMethod::TrueCdf, SimMethod::Ecdf, SimMethod::Parametric];

    pub fn name(&self) -> &'static str {
        match self {
            SimMethod::TrueCdf => "true_cdf",
            SimMethod::Ecdf => "ecdf",
            SimMethod::Parametric => "parametric",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimCell {
    pub d: f64,
    pub n: usize,
    pub method: SimMethod,
    pub mean: f64,
    /// Population standard deviation over repeats.
    pub std: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub config: SimConfig,
    /// Ordered by d, then n, then method as in [`SimMethod::ALL`].
    pub cells: Vec<SimCell>,
}

/// Mean and population standard deviation; constant input gives exactly
/// `(value, 0)`.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    if xs.iter().all(|&x| x == xs[0]) {
        return (xs[0], 0.0);
    }
    let m = pairwise_sum(xs) / xs.len() as f64;
    let sq: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
    (m, (pairwise_sum(&sq) / xs.len() as f64).sqrt())
}

/// Epsilon* of the generating pair, `Γ(k1 + d, θ1)` against `Γ(k1, θ1)`.
pub fn true_epsilon_star_gamma(k1: f64, theta1: f64, d: f64, delta: f64) -> Result<f64> {
    let train: FittedDistribution = GammaParams::new(k1, theta1)?.into();
    let pop: FittedDistribution = GammaParams::new(k1 + d, theta1)?.into();
    Ok(epsilon_star_parametric(&pop, &train, delta)?.epsilon_star)
}

/// The logit-transform and Normal-fit estimate on one pair of samples.
pub fn parametric_estimate(train: &[f64], pop: &[f64], delta: f64) -> Result<f64> {
    let (tr, po) = transform_losses(
        &LossSet::training(train.to_vec())?,
        &LossSet::population(pop.to_vec())?,
        DEFAULT_ALPHA,
    )?;
    let (ftr, fpo) = (fit_normal(&tr.values)?, fit_normal(&po.values)?);
    Ok(epsilon_star_parametric(&fpo.into(), &ftr.into(), delta)?.epsilon_star)
}

const ROLE_TRAIN: u64 = 0;
const ROLE_POP: u64 = 1;

/// The seeded training and population draws of one cell.
pub fn cell_samples(cfg: &SimConfig, d: f64, n: usize, repeat: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let key = |role| derive_seed(cfg.seed, &[d.to_bits(), n as u64, repeat as u64, role]);
    let train = sample_gamma(&GammaParams::new(cfg.k1, cfg.theta1)?, n, key(ROLE_TRAIN));
    let pop = sample_gamma(&GammaParams::new(cfg.k1 + d, cfg.theta1)?, n, key(ROLE_POP));
    Ok((train, pop))
}

fn run(cfg: &SimConfig, d_values: &[f64]) -> Result<SimResult> {
    cfg.validate()?;
    let truths = d_values
        .iter()
        .map(|&d| true_epsilon_star_gamma(cfg.k1, cfg.theta1, d, cfg.delta))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize, usize)> = (0..d_values.len())
        .flat_map(|di| {
            cfg.n_values
                .iter()
                .enumerate()
                .flat_map(move |(ni, _)| (0..cfg.repeats).map(move |r| (di, ni, r)))
        })
        .collect();
    let sampled = jobs
        .par_iter()
        .map(|&(di, ni, r)| {
            let (d, n) = (d_values[di], cfg.n_values[ni]);
            let (train, pop) = cell_samples(cfg, d, n, r)?;
            let ecdf = epsilon_star_ecdf(&train, &pop, cfg.delta, cfg.ecdf_grid(n))?.epsilon_star;
            let param = parametric_estimate(&train, &pop, cfg.delta)?;
            Ok((ecdf, param))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;

    let mut cells = Vec::with_capacity(d_values.len() * cfg.n_values.len() * 3);
    let per_block = cfg.repeats;
    for (di, &d) in d_values.iter().enumerate() {
        for (ni, &n) in cfg.n_values.iter().enumerate() {
            let start = (di * cfg.n_values.len() + ni) * per_block;
            let block = &sampled[start..start + per_block];
            for method in SimMethod::ALL {
                let values: Vec<f64> = match method {
                    SimMethod::TrueCdf => vec![truths[di]; cfg.repeats],
                    SimMethod::Ecdf => block.iter().map(|v| v.0).collect(),
                    SimMethod::Parametric => block.iter().map(|v| v.1).collect(),
                };
                let (mean, std) = mean_std(&values);
                cells.push(SimCell {
                    d,
                    n,
                    method,
                    mean,
                    std,
                    values,
                });
            }
        }
    }
    Ok(SimResult {
        config: cfg.clone(),
        cells,
    })
}

/// Every `(d, n, repeat)` cell of the configuration.
pub fn run_shift_experiment(cfg: &SimConfig) -> Result<SimResult> {
    run(cfg, &cfg.d_values)
}

/// Identical generating distributions: `cfg.d_values` is replaced by `{0}`.
pub fn run_identity_experiment(cfg: &SimConfig) -> Result<SimResult> {
    let cfg = SimConfig {
        d_values: vec![0.0],
        ..cfg.clone()
    };
    run(&cfg, &[0.0])
}

impl SimResult {
    pub fn cell(&self, d: f64, n: usize, method: SimMethod) -> Option<&SimCell> {
        self.cells.iter().find(|c| c.d == d && c.n == n && c.method == method)
    }

    pub fn mean(&self, d: f64, n: usize, method: SimMethod) -> Option<f64> {
        self.cell(d, n, method).map(|c| c.mean)
    }

    /// One row per `(d, n, method, repeat)`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d,n,method,repeat,epsilon_star\n");
        for c in &self.cells {
            for (r, v) in c.values.iter().enumerate() {
                out.push_str(&format!("{},{},{},{},{:.16e}\n", c.d, c.n, c.method.name(), r, v));
            }
        }
        out
    }

    /// Summary document: configuration, ecdf grid per `n` and the
    /// per-cell mean and standard deviation.
    pub fn summary_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Grid {
            n: usize,
            ecdf_grid: usize,
            reduced: bool,
        }
        #[derive(Serialize)]
        struct Row<'a> {
            d: f64,
            n: usize,
            method: &'a str,
            mean: f64,
            std: f64,
        }
        #[derive(Serialize)]
        struct Summary<'a> {
            schema: &'a str,
            version: &'a str,
            config: &'a SimConfig,
            ecdf_grids: Vec<Grid>,
            cells: Vec<Row<'a>>,
        }
        let s = Summary {
            schema: "epsilon-star.simulation/1",
            version: env!("CARGO_PKG_VERSION"),
            config: &self.config,
            ecdf_grids: self
                .config
                .n_values
                .iter()
                .map(|&n| Grid {
                    n,
                    ecdf_grid: self.config.ecdf_grid(n),
                    reduced: self.config.ecdf_grid(n) < DEFAULT_GRID_SIZE,
                })
                .collect(),
            cells: self
                .cells
                .iter()
                .map(|c| Row {
                    d: c.d,
                    n: c.n,
                    method: c.method.name(),
                    mean: c.mean,
                    std: c.std,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&s).map_err(|e| Error::Serialize(e.to_string()))
    }

    /// Mean ± one standard deviation per method against `log10 n`, one
    /// colour per method and one label per `d`.
    pub fn to_svg(&self) -> String {
        let xs: Vec<f64> = self.cells.iter().map(|c| (c.n as f64).log10()).collect();
        let hi = self.cells.iter().map(|c| c.mean + c.std).fold(0.0, f64::max);
        let x_lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let x_hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut plot = Plot::new((x_lo - 0.3, x_hi + 0.3), (0.0, hi));
        for c in &self.cells {
            let offset = match c.method {
                SimMethod::TrueCdf => -0.08,
                SimMethod::Ecdf => 0.0,
                SimMethod::Parametric => 0.08,
            };
            let color = match c.method {
                SimMethod::TrueCdf => "black",
                SimMethod::Ecdf => "#d62728",
                SimMethod::Parametric => "#1f77b4",
            };
            let x = (c.n as f64).log10() + offset;
            plot.segment((x, c.mean - c.std), (x, c.mean + c.std), color);
            plot.point(x, c.mean, color, &format!("d={} n={} {}", c.d, c.n, c.method.name()));
        }
        for &d in &self.config.d_values {
            if let Some(c) = self.cells.iter().find(|c| c.d == d && c.method == SimMethod::TrueCdf) {
                plot.label(x_lo - 0.3, c.mean, &format!("d={d}"));
            }
        }
        plot.render(
            "log10 n",
            "epsilon*",
            "true_cdf (black), ecdf (red), parametric (blue): mean and std",
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SimConfig {
        SimConfig {
            d_values: vec![0.0, 1.0],
            n_values: vec![1000],
            repeats: 2,
            seed: 7,
            ..Default::default()
        }
    }

    #[test]
    fn cardinality_and_determinism() {
        let a = run_shift_experiment(&small()).unwrap();
        assert_eq!(a.cells.len(), 6);
        assert_eq!(a.to_csv().lines().count(), 1 + 12);
        let b = run_shift_experiment(&small()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn truth_is_exact_and_constant() {
        let r = run_shift_experiment(&small()).unwrap();
        let t0 = r.cell(0.0, 1000, SimMethod::TrueCdf).unwrap();
        assert_eq!(t0.mean, 0.0);
        assert_eq!(t0.std, 0.0);
        let t1 = r.cell(1.0, 1000, SimMethod::TrueCdf).unwrap();
        assert_eq!(t1.std, 0.0);
        assert!(t1.mean > 1.0);
        assert!(r.cells.iter().all(|c| c.values.iter().all(|&v| v >= 0.0)));
    }

    #[test]
    fn truth_is_scale_free() {
        let base = true_epsilon_star_gamma(2.0, 1.0, 2.0, 1e-5).unwrap();
        for theta in [5.0, 50.0] {
            assert!((true_epsilon_star_gamma(2.0, theta, 2.0, 1e-5).unwrap() - base).abs() < 1e-9);
        }
    }

    #[test]
    fn identity_experiment_forces_d_zero() {
        let r = run_identity_experiment(&small()).unwrap();
        assert!(r.cells.iter().all(|c| c.d == 0.0));
        assert_eq!(r.cells.len(), 3);
    }

    #[test]
    fn ecdf_grid_scales_with_n() {
        let c = SimConfig::default();
        assert_eq!(c.ecdf_grid(1000), 200_000);
        assert_eq!(c.ecdf_grid(100_000), 2_000_000);
        let bad = SimConfig {
            repeats: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn outputs_render() {
        let r = run_shift_experiment(&small()).unwrap();
        let json: serde_json::Value = serde_json::from_str(&r.summary_json().unwrap()).unwrap();
        assert_eq!(json["cells"].as_array().unwrap().len(), 6);
        assert!(r.to_svg().starts_with("<svg"));
    }

    #[test]
    fn mean_std_basics() {
        assert_eq!(mean_std(&[0.1, 0.1, 0.1]), (0.1, 0.0));
        let (m, s) = mean_std(&[1.0, 3.0]);
        assert_eq!((m, s), (2.0, 1.0));
    }
}
