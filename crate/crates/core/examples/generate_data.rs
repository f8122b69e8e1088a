//! Regenerates the seeded sample files under `data/`.
//!
//! * `gamma_train.csv`, `gamma_pop.csv`: 10^5 draws from Γ(2, 5) and Γ(5, 5)
//! * `normal_sample.csv`: 5000 standard Normal draws
//! * `landscape/`: a 12-strategy manifest of small Gamma loss files
//!
//! Usage: `cargo run --release --example generate_data [out_dir]`

use std::path::PathBuf;

use epsilon_star::distfit::{sample_gamma, GammaParams, GmmComponent, GmmParams};
use epsilon_star::io::{write_atomic, write_loss_file, Manifest, ManifestEntry};
use epsilon_star::landscape::DP_TAG;

fn main() -> epsilon_star::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data"));

    let g = |k: f64| GammaParams::new(k, 5.0);
    write_loss_file(&out.join("gamma_train.csv"), &sample_gamma(&g(2.0)?, 100_000, 1))?;
    write_loss_file(&out.join("gamma_pop.csv"), &sample_gamma(&g(5.0)?, 100_000, 2))?;

    let normal = GmmParams::new(vec![GmmComponent { weight: 1.0, mu: 0.0, sigma: 1.0 }])?;
    write_loss_file(&out.join("normal_sample.csv"), &normal.sample(5000, 3))?;

    // pseudo-strategies: larger shape gaps mean more memorization, and here
    // also more utility; the first half carry a DP tag
    let dir = out.join("landscape");
    let mut entries = Vec::new();
    for i in 0..12u64 {
        let d = 0.25 * i as f64;
        let id = format!("s{i:02}");
        let train = format!("{id}_train.csv");
        let pop = format!("{id}_pop.csv");
        write_loss_file(&dir.join(&train), &sample_gamma(&g(2.0)?, 2000, 100 + 2 * i))?;
        write_loss_file(&dir.join(&pop), &sample_gamma(&g(2.0 + d)?, 2000, 101 + 2 * i))?;
        let wiggle = [0.0, 0.02, -0.015, 0.01, -0.02, 0.015][i as usize % 6];
        let mut tags = std::collections::BTreeMap::new();
        tags.insert("shape_gap".to_string(), format!("{d}"));
        if i < 6 {
            tags.insert(DP_TAG.to_string(), format!("{}", 0.5 * (i + 1) as f64));
        }
        entries.push(ManifestEntry {
            model_id: id,
            train: train.into(),
            pop: pop.into(),
            utility: Some(0.6 + 0.12 * (1.0 + d).ln() + wiggle),
            strategy: None,
            tags,
        });
    }
    let manifest = Manifest {
        entries,
        base_dir: dir.clone(),
    };
    write_atomic(&dir.join("manifest.json"), (manifest.to_json()? + "\n").as_bytes())?;
    println!("wrote sample data under {}", out.display());
    Ok(())
}
