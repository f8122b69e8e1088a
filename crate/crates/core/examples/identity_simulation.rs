//! Identical training and population distributions: every estimate should be
//! 0, and the sampled ones approach it as the loss samples grow.
//!
//! Usage: `cargo run --release --example identity_simulation [repeats] [max_n]`

use epsilon_star::simulation::{run_identity_experiment, SimConfig, SimMethod};

fn main() -> epsilon_star::Result<()> {
    let mut args = std::env::args().skip(1);
    let repeats = args.next().map_or(10, |s| s.parse().expect("repeats must be an integer"));
    let max_n: usize = args.next().map_or(100_000, |s| s.parse().expect("max_n must be an integer"));
    let cfg = SimConfig {
        repeats,
        d_values: vec![0.0],
        n_values: SimConfig::default().n_values.into_iter().filter(|&n| n <= max_n).collect(),
        seed: 2024,
        ..Default::default()
    };
    let result = run_identity_experiment(&cfg)?;
    println!("{:>7} {:>8} {:>16} {:>16}", "n", "true_cdf", "ecdf", "parametric");
    for &n in &cfg.n_values {
        let c = |m| result.cell(0.0, n, m).expect("every cell is computed");
        let (e, p) = (c(SimMethod::Ecdf), c(SimMethod::Parametric));
        println!(
            "{n:>7} {:>8.4} {:>8.4} ± {:<5.3} {:>8.4} ± {:<5.3}",
            c(SimMethod::TrueCdf).mean,
            e.mean,
            e.std,
            p.mean,
            p.std
        );
    }
    Ok(())
}
