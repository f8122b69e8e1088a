//! Privacy-utility landscape over the strategies in a manifest: one audit per
//! instance, the nondominated set, its upper hull and per-category densities.
//!
//! Usage: `cargo run --release --example landscape_frontier [manifest.json] [out_dir]`

use std::path::PathBuf;

use epsilon_star::epsilon::audit_detailed;
use epsilon_star::io::{read_loss_file, write_atomic, AuditConfig, Manifest};
use epsilon_star::landscape::{
    aggregate_strategies, emit_landscape, marginals_by_dp, pareto_frontier, FrontierObjective, InstanceScore,
    LandscapeFormat,
};
use epsilon_star::loss_model::LossRole;

fn main() -> epsilon_star::Result<()> {
    let mut args = std::env::args().skip(1);
    let manifest_path = args.next().map_or_else(
        || PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/landscape/manifest.json"),
        PathBuf::from,
    );
    let out_dir = args.next().map(PathBuf::from);

    let manifest = Manifest::load(&manifest_path)?;
    let cfg = AuditConfig::default();
    let mut instances = Vec::new();
    for e in &manifest.entries {
        let train = read_loss_file(&manifest.resolve(&e.train), LossRole::Training, true)?;
        let pop = read_loss_file(&manifest.resolve(&e.pop), LossRole::Population, true)?;
        instances.push(InstanceScore {
            strategy: e.strategy_id().to_string(),
            utility: e.utility.unwrap_or_default(),
            epsilon_star: audit_detailed(&train, &pop, &cfg)?.result.epsilon_star,
            tags: e.tags.clone(),
        });
    }
    let points = aggregate_strategies(&instances)?;
    let frontier = pareto_frontier(&points, FrontierObjective::Mean)?;
    for p in &points {
        let mark = if frontier.hull_set.contains(&p.id) {
            "hull"
        } else if frontier.dominance_set.contains(&p.id) {
            "front"
        } else {
            ""
        };
        println!("{:<4} utility {:.4}  ε* {:>7.4}  dp {:<5} {mark}", p.id, p.utility, p.eps_star_mean, p.is_dp());
    }
    let marginals = marginals_by_dp(&points, 64);
    println!("{} marginal densities", marginals.len());

    if let Some(dir) = out_dir {
        for f in [LandscapeFormat::Json, LandscapeFormat::Csv, LandscapeFormat::Svg] {
            let path = dir.join(format!("landscape.{}", f.extension()));
            write_atomic(&path, emit_landscape(&points, &frontier, &marginals, f)?.as_bytes())?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}
