//! Known-Gamma validation: training losses Γ(2, 5), population losses
//! Γ(2 + d, 5), scored by the exact CDFs, empirical CDFs and Normal fits.
//!
//! Usage: `cargo run --release --example shift_simulation [repeats] [max_n]`

use epsilon_star::simulation::{run_shift_experiment, SimConfig, SimMethod};

fn main() -> epsilon_star::Result<()> {
    let mut args = std::env::args().skip(1);
    let repeats = args.next().map_or(10, |s| s.parse().expect("repeats must be an integer"));
    let max_n: usize = args.next().map_or(100_000, |s| s.parse().expect("max_n must be an integer"));
    let cfg = SimConfig {
        repeats,
        n_values: SimConfig::default().n_values.into_iter().filter(|&n| n <= max_n).collect(),
        seed: 2024,
        ..Default::default()
    };
    let start = std::time::Instant::now();
    let result = run_shift_experiment(&cfg)?;
    println!("{:>4} {:>7} {:>10} {:>16} {:>16}", "d", "n", "true_cdf", "ecdf", "parametric");
    for &d in &cfg.d_values {
        for &n in &cfg.n_values {
            let c = |m| result.cell(d, n, m).expect("every cell is computed");
            let (e, p) = (c(SimMethod::Ecdf), c(SimMethod::Parametric));
            println!(
                "{d:>4} {n:>7} {:>10.4} {:>8.4} ± {:<5.3} {:>8.4} ± {:<5.3}",
                c(SimMethod::TrueCdf).mean,
                e.mean,
                e.std,
                p.mean,
                p.std
            );
        }
    }
    println!("elapsed {:.1?}", start.elapsed());
    Ok(())
}
