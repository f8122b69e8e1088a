//! Epsilon* between Normal loss distributions as the population mean moves
//! away from the training mean. The discrete formula on grids of `t`, with
//! both rates kept inside `(δ, 1 - δ)`, approaches the supremum from below.
//!
//! Usage: `cargo run --release --example parametric_normals`

use epsilon_star::distfit::{FittedDistribution, NormalParams};
use epsilon_star::epsilon::{epsilon_star_discrete, epsilon_star_parametric, rate_curve_from_distributions};

fn main() -> epsilon_star::Result<()> {
    let train: FittedDistribution = NormalParams::standard().into();
    let delta = 1e-5;
    println!("{:>5} {:>12} {:>8} {:>12} {:>12}", "shift", "parametric", "branch", "grid 99", "grid 99999");
    for shift in [0.0, 0.5, 1.0, 2.0, 3.0, 4.0] {
        let pop: FittedDistribution = NormalParams::new(shift, 1.0)?.into();
        let sup = epsilon_star_parametric(&pop, &train, delta)?;
        let grid = |n: usize| -> epsilon_star::Result<f64> {
            let ts: Vec<f64> = (1..=n).map(|i| i as f64 / (n + 1) as f64).collect();
            let (curve, _) = rate_curve_from_distributions(&pop, &train, &ts)?.clamped(delta, 1.0 - delta);
            if curve.is_empty() {
                return Ok(0.0);
            }
            Ok(epsilon_star_discrete(&curve, delta)?.epsilon_star)
        };
        println!(
            "{shift:>5} {:>12.6} {:>8?} {:>12.6} {:>12.6}",
            sup.epsilon_star,
            sup.argmax_branch,
            grid(99)?,
            grid(99_999)?
        );
    }
    // the same pair at several δ: smaller δ admits more extreme rates
    let pop: FittedDistribution = NormalParams::new(3.0, 1.0)?.into();
    for delta in [0.0, 1e-8, 1e-5, 1e-3, 1e-1] {
        let r = epsilon_star_parametric(&pop, &train, delta)?;
        println!("shift 3, δ = {delta:<6e}: ε* = {:.6}", r.epsilon_star);
    }
    Ok(())
}
