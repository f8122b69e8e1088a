use crate::distfit::FittedDistribution;
use crate::error::{check_delta, Result};

use super::{log_ratios_with_complements, ArgMax, Branch, Diagnostics, EpsilonStarResult, Method};

/// Coarse scan points across the clamp window.
pub const SCAN_POINTS: usize = 10_000;

/// Golden-section stopping width in logit(t). Since `dt/dz = t(1-t) <= 1/4`,
/// this bounds the final bracket in `t` by `2.5e-13`.
pub const Z_TOLERANCE: f64 = 1e-12;

/// Smallest tail probability searched when `δ` is below it; both families
/// stay accurate in relative terms down to this level.
pub const TAIL_FLOOR: f64 = 1e-300;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// The four log-ratios at threshold `q`, reading
/// `t = F_pop(q)`, `1 - t = S_pop(q)`, `η = S_tr(q)`, `1 - η = F_tr(q)`
/// straight from each tail.
pub fn branch_log_ratios_at(pop: &FittedDistribution, train: &FittedDistribution, q: f64, delta: f64) -> [Option<f64>; 4] {
    log_ratios_with_complements(pop.cdf(q), pop.sf(q), train.sf(q), train.cdf(q), delta)
}

/// Supremum search for [`epsilon_star_parametric`].
///
/// The search runs in `z = logit(t)`: uniform steps in `z` are log-spaced in
/// `t` near both 0 and 1, where maximizers usually sit. Each branch's best scan
/// point is refined by golden section over its two neighbouring intervals.
/// The endpoint limit `1 - δ` of every branch is at most 1 and never beats the
/// unit floor, so it needs no separate evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParametricSearch {
    pub scan_points: usize,
    pub z_tolerance: f64,
}

impl Default for ParametricSearch {
    fn default() -> Self {
        Self {
            scan_points: SCAN_POINTS,
            z_tolerance: Z_TOLERANCE,
        }
    }
}

struct Problem<'a> {
    pop: &'a FittedDistribution,
    train: &'a FittedDistribution,
    delta: f64,
    q_lo: f64,
    q_hi: f64,
}

impl Problem<'_> {
    fn logit_t(&self, q: f64) -> f64 {
        self.pop.cdf(q).ln() - self.pop.sf(q).ln()
    }

    /// Threshold with `logit(F_pop(q)) = z`, kept inside the window.
    fn threshold(&self, z: f64) -> f64 {
        let q = if z <= 0.0 {
            let e = z.exp();
            self.pop.quantile(e / (1.0 + e))
        } else {
            self.pop.quantile_upper(1.0 / (1.0 + z.exp()))
        };
        q.map_or(self.q_lo, |q| q.clamp(self.q_lo, self.q_hi))
    }

    fn ratios(&self, z: f64) -> (f64, [Option<f64>; 4]) {
        let q = self.threshold(z);
        (self.pop.cdf(q), branch_log_ratios_at(self.pop, self.train, q, self.delta))
    }

    fn branch_value(&self, z: f64, b: usize) -> f64 {
        self.ratios(z).1[b].unwrap_or(f64::NEG_INFINITY)
    }
}

impl ParametricSearch {
    pub fn run(&self, pop: &FittedDistribution, train: &FittedDistribution, delta: f64) -> Result<EpsilonStarResult> {
        check_delta(delta)?;
        pop.require_continuous("parametric epsilon*")?;
        train.require_continuous("parametric epsilon*")?;
        let floor = delta.max(TAIL_FLOOR);
        // t, 1 - t, η and 1 - η must each be at least `floor`
        let q_lo = pop.quantile(floor)?.max(train.quantile(floor)?);
        let q_hi = pop.quantile_upper(floor)?.min(train.quantile_upper(floor)?);

        let mut diagnostics = Diagnostics {
            threshold_window: Some((q_lo, q_hi)),
            refine_iterations: Some(0),
            ..Default::default()
        };
        if !(q_lo < q_hi) {
            return Ok(EpsilonStarResult {
                epsilon_star: 0.0,
                delta,
                method: Method::Parametric,
                argmax_branch: Branch::Unit,
                argmax_t: 0.5,
                clamp_window: (floor.min(0.5), (1.0 - floor).max(0.5)),
                diagnostics,
            });
        }

        let p = Problem {
            pop,
            train,
            delta,
            q_lo,
            q_hi,
        };
        let (z_lo, z_hi) = (p.logit_t(q_lo), p.logit_t(q_hi));
        let n = self.scan_points.max(2);
        let zs: Vec<f64> = (0..n)
            .map(|i| if i + 1 == n { z_hi } else { z_lo + (z_hi - z_lo) * i as f64 / (n - 1) as f64 })
            .collect();

        let mut best = ArgMax::new(pop.cdf(p.threshold(0.5 * (z_lo + z_hi))));
        let mut scan_best = [(f64::NEG_INFINITY, 0usize); 4];
        for (i, &z) in zs.iter().enumerate() {
            let (t, r) = p.ratios(z);
            best.offer(t, r);
            for (b, v) in r.iter().enumerate() {
                if let Some(v) = *v {
                    if v > scan_best[b].0 {
                        scan_best[b] = (v, i);
                    }
                }
            }
        }
        diagnostics.pairs_total = n;

        let mut iterations = 0;
        for (b, &(v, i)) in scan_best.iter().enumerate() {
            if v == f64::NEG_INFINITY {
                continue;
            }
            let lo = zs[i.saturating_sub(1)];
            let hi = zs[(i + 1).min(n - 1)];
            let (z, its) = self.golden_max(|z| p.branch_value(z, b), lo, hi);
            iterations += its;
            let (t, r) = p.ratios(z);
            let mut only = [None; 4];
            only[b] = r[b];
            best.offer(t, only);
        }
        diagnostics.refine_iterations = Some(iterations);

        Ok(EpsilonStarResult {
            epsilon_star: best.value,
            delta,
            method: Method::Parametric,
            argmax_branch: best.branch,
            argmax_t: best.t,
            clamp_window: (pop.cdf(q_lo), pop.cdf(q_hi)),
            diagnostics,
        })
    }

    /// Golden-section maximization over `[a, b]`; returns the best point seen
    /// and the iteration count.
    fn golden_max(&self, f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, usize) {
        let mut c = b - INV_PHI * (b - a);
        let mut d = a + INV_PHI * (b - a);
        let (mut fc, mut fd) = (f(c), f(d));
        let mut its = 0;
        // 200 steps shrink any bracket by 1e-41, past the resolution of f64
        while (b - a).abs() > self.z_tolerance && its < 200 {
            if fc >= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - INV_PHI * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + INV_PHI * (b - a);
                fd = f(d);
            }
            its += 1;
        }
        let ends = [(a, f(a)), (b, f(b)), (c, fc), (d, fd)];
        let (z, _) = ends
            .into_iter()
            .fold((a, f64::NEG_INFINITY), |acc, (z, v)| if v > acc.1 { (z, v) } else { acc });
        (z, its)
    }
}

/// Supremum over every threshold of the four ratios between two continuous
/// distributions, with `t` and `η` confined to `[δ, 1 - δ]`.
///
/// `δ = 0` is accepted; the window then extends to tail probabilities of
/// [`TAIL_FLOOR`] and separated distributions give large but finite values.
pub fn epsilon_star_parametric(pop: &FittedDistribution, train: &FittedDistribution, delta: f64) -> Result<EpsilonStarResult> {
    ParametricSearch::default().run(pop, train, delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distfit::{EmpiricalDistribution, GammaParams, NormalParams};
    use crate::error::Error;

    fn normal(mu: f64, sigma: f64) -> FittedDistribution {
        NormalParams::new(mu, sigma).unwrap().into()
    }

    #[test]
    fn identical_distributions_give_exact_zero() {
        for d in [normal(0.0, 1.0), normal(-3.0, 0.2), GammaParams::new(2.0, 5.0).unwrap().into()] {
            for delta in [0.0, 1e-5, 1e-2] {
                let r = epsilon_star_parametric(&d, &d, delta).unwrap();
                assert_eq!(r.epsilon_star, 0.0);
                assert_eq!(r.argmax_branch, Branch::Unit);
            }
        }
    }

    #[test]
    fn large_delta_and_mild_separation_give_zero() {
        let r = epsilon_star_parametric(&normal(0.1, 1.0), &normal(0.0, 1.0), 0.49).unwrap();
        assert_eq!(r.epsilon_star, 0.0);
    }

    #[test]
    fn separated_normals_exceed_grid_values() {
        let (pop, train) = (normal(3.0, 1.0), normal(0.0, 1.0));
        let r = epsilon_star_parametric(&pop, &train, 1e-5).unwrap();
        for i in 1..1000 {
            let t = i as f64 / 1000.0;
            let q = pop.quantile(t).unwrap();
            for v in branch_log_ratios_at(&pop, &train, q, 1e-5).into_iter().flatten() {
                let eta = train.sf(q);
                if eta >= 1e-5 && eta <= 1.0 - 1e-5 {
                    assert!(v <= r.epsilon_star + 1e-12);
                }
            }
        }
        assert!(r.epsilon_star > 2.0);
        assert!(r.argmax_t >= r.clamp_window.0 && r.argmax_t <= r.clamp_window.1);
    }

    #[test]
    fn delta_zero_is_large_but_finite() {
        let r = epsilon_star_parametric(&normal(3.0, 1.0), &normal(0.0, 1.0), 0.0).unwrap();
        assert!(r.epsilon_star.is_finite() && r.epsilon_star > 50.0, "{}", r.epsilon_star);
    }

    #[test]
    fn swapping_at_delta_zero_is_symmetric() {
        let (a, b) = (normal(1.0, 0.7), normal(-0.5, 1.4));
        let x = epsilon_star_parametric(&a, &b, 0.0).unwrap().epsilon_star;
        let y = epsilon_star_parametric(&b, &a, 0.0).unwrap().epsilon_star;
        assert!((x - y).abs() <= 1e-9 * x.max(1.0), "{x} vs {y}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let n = normal(0.0, 1.0);
        let e: FittedDistribution = EmpiricalDistribution::new(vec![1.0, 2.0]).unwrap().into();
        assert!(matches!(epsilon_star_parametric(&n, &n, 1.0), Err(Error::Domain(_))));
        assert!(matches!(epsilon_star_parametric(&n, &e, 0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn empty_window_reports_unit() {
        let r = epsilon_star_parametric(&normal(0.0, 1.0), &normal(50.0, 1.0), 0.3).unwrap();
        assert_eq!(r.epsilon_star, 0.0);
        assert_eq!(r.argmax_branch, Branch::Unit);
        assert!(r.argmax_t >= r.clamp_window.0 && r.argmax_t <= r.clamp_window.1);
    }
}
