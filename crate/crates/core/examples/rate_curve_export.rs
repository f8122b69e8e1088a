//! Exports the empirical rate curve of a training and a population loss file
//! as `t,eta` CSV for plotting, dropping pairs with either rate below 1e-9.
//!
//! Usage: `cargo run --release --example rate_curve_export [train.csv pop.csv [out.csv]]`
//! (defaults to the bundled Gamma samples; output goes to `rate_curve.csv` in
//! the default output directory).

use std::path::PathBuf;

use epsilon_star::epsilon::ecdf_rate_curve;
use epsilon_star::io::{default_out_dir, read_loss_file, write_atomic};
use epsilon_star::loss_model::LossRole;

const MIN_RATE: f64 = 1e-9;

fn main() -> epsilon_star::Result<()> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let mut args = std::env::args().skip(1);
    let train_path = args.next().map_or_else(|| data.join("gamma_train.csv"), PathBuf::from);
    let pop_path = args.next().map_or_else(|| data.join("gamma_pop.csv"), PathBuf::from);
    let out = args.next().map_or_else(|| default_out_dir().join("rate_curve.csv"), PathBuf::from);

    let train = read_loss_file(&train_path, LossRole::Training, true)?;
    let pop = read_loss_file(&pop_path, LossRole::Population, true)?;
    let curve = ecdf_rate_curve(train.values(), pop.values(), 20_000)?;

    let mut csv = String::from("t,eta\n");
    let mut kept = 0;
    for p in curve.pairs().iter().filter(|p| p.t >= MIN_RATE && p.eta >= MIN_RATE) {
        csv.push_str(&format!("{:.16e},{:.16e}\n", p.t, p.eta));
        kept += 1;
    }
    write_atomic(&out, csv.as_bytes())?;
    println!("{kept} of {} pairs written to {}", curve.len(), out.display());
    Ok(())
}
