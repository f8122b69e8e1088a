//! Audits one model from a training and a population loss file with each of
//! the three methods.
//!
//! Usage: `cargo run --release --example audit_losses [train.csv pop.csv]`
//! (defaults to the bundled Gamma samples).

use std::path::PathBuf;

use epsilon_star::epsilon::{audit_detailed, Method};
use epsilon_star::io::{read_loss_file, AuditConfig, DeltaPolicy};
use epsilon_star::loss_model::LossRole;

fn main() -> epsilon_star::Result<()> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let mut args = std::env::args().skip(1);
    let train_path = args.next().map_or_else(|| data.join("gamma_train.csv"), PathBuf::from);
    let pop_path = args.next().map_or_else(|| data.join("gamma_pop.csv"), PathBuf::from);

    let train = read_loss_file(&train_path, LossRole::Training, true)?;
    let pop = read_loss_file(&pop_path, LossRole::Population, true)?;
    println!("{} training and {} population losses", train.len(), pop.len());

    for (method, grid) in [(Method::Parametric, 0), (Method::Ecdf, 200_000), (Method::Discrete, 0)] {
        for delta in [DeltaPolicy::AUTO, DeltaPolicy::Fixed(1e-5)] {
            let cfg = AuditConfig {
                delta,
                method,
                grid_size: if grid > 0 { grid } else { AuditConfig::default().grid_size },
                ..AuditConfig::default()
            };
            let out = audit_detailed(&train, &pop, &cfg)?;
            let r = &out.result;
            println!(
                "{method:<10} δ = {:<10.3e} ε* = {:>8.4}  branch {:?} at t = {:.4e}",
                r.delta, r.epsilon_star, r.argmax_branch, r.argmax_t
            );
            if let (Some(ft), Some(fp)) = (out.fit_train, out.fit_pop) {
                println!(
                    "{:10} fits: train N({:.4}, {:.4}), pop N({:.4}, {:.4})",
                    "", ft.mu, ft.sigma, fp.mu, fp.sigma
                );
            }
        }
    }
    Ok(())
}
