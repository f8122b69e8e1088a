//! Mechanism-level bound for an ensemble of model instances: the formula on
//! averaged false negative rates, against the log-mean-exp of the
//! per-instance values.
//!
//! Usage: `cargo run --release --example mechanism_ensemble [instances] [seed]`

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use epsilon_star::distfit::{FittedDistribution, NormalParams};
use epsilon_star::mechanism::{default_t_grid, mechanism_audit, EnsembleRates};

fn main() -> epsilon_star::Result<()> {
    let mut args = std::env::args().skip(1);
    let instances: usize = args.next().map_or(50, |s| s.parse().expect("instances must be an integer"));
    let seed: u64 = args.next().map_or(7, |s| s.parse().expect("seed must be an integer"));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // each instance memorizes to a different degree
    let models: Vec<(FittedDistribution, FittedDistribution)> = (0..instances)
        .map(|_| {
            let shift = rng.gen_range(0.0..3.0);
            Ok((NormalParams::new(shift, 1.0)?.into(), NormalParams::standard().into()))
        })
        .collect::<epsilon_star::Result<_>>()?;
    let ensemble = EnsembleRates::from_distributions(default_t_grid(1000), &models)?;
    let report = mechanism_audit(&ensemble, 1e-5)?;

    let per = &report.per_model_epsilon;
    let (lo, hi) = per.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    println!("{} instances, per-instance ε* in [{lo:.4}, {hi:.4}]", report.n_models);
    println!("ε̄ = {:.6}", report.epsilon_bar);
    println!("log-mean-exp bound = {:.6}, holds: {}", report.jensen_bound, report.holds);
    Ok(())
}
