//! Hold-out Kolmogorov-Smirnov checks of Gaussian-mixture fits with a growing
//! number of components.
//!
//! Usage: `cargo run --release --example ks_fit_quality [losses.csv]`

use std::path::PathBuf;

use epsilon_star::goodness_of_fit::{fit_quality_sweep, FIT_ALPHA};
use epsilon_star::io::read_loss_file;
use epsilon_star::loss_model::LossRole;

fn main() -> epsilon_star::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/normal_sample.csv"), PathBuf::from);
    let losses = read_loss_file(&path, LossRole::Population, true)?;
    let reports = fit_quality_sweep(losses.values(), &[1, 2, 3, 4, 5], &[250, 1000], 0)?;
    println!("{:>10} {:>8} {:>8} {:>8}  pass at {FIT_ALPHA}", "components", "held out", "D", "p");
    for r in &reports {
        println!(
            "{:>10} {:>8} {:>8.4} {:>8.4}  {}",
            r.n_components, r.n_samples, r.ks.statistic_d, r.ks.p_value, r.passes_alpha
        );
    }
    Ok(())
}
