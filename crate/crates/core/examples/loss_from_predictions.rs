//! From model outputs to loss files: binary and multi-class log-odds losses,
//! the prediction CSV layouts, and the logit transform used before fitting.
//!
//! Usage: `cargo run --release --example loss_from_predictions`

use std::path::Path;

use epsilon_star::io::parse_loss_csv;
use epsilon_star::loss_model::{
    binary_loss, multiclass_loss, transform_losses, Label, LossRole, PredictionRecord, DEFAULT_ALPHA,
};

fn main() -> epsilon_star::Result<()> {
    for (f, y) in [(0.9, 1), (0.9, 0), (0.5, 1), (1e-15, 1)] {
        let rec = PredictionRecord::new(vec![f], Label::Index(y), true)?;
        println!("binary f = {f:<6e} y = {y}: loss {:>9.4}", binary_loss(&rec)?);
    }
    let probs = vec![0.7, 0.2, 0.1];
    for y in 0..3 {
        let rec = PredictionRecord::new(probs.clone(), Label::Index(y), true)?;
        println!("3-class {probs:?} y = {y}: loss {:>9.4}", multiclass_loss(&rec)?);
    }

    // the two prediction layouts a loss file may use
    let binary_csv = "prediction,label\n0.95,1\n0.80,1\n0.30,0\n0.65,1\n0.10,0\n";
    let multi_csv = "p_0,p_1,p_2,label\n0.7,0.2,0.1,0\n0.1,0.8,0.1,1\n0.3,0.3,0.4,2\n0.5,0.4,0.1,1\n";
    let train = parse_loss_csv(binary_csv, Path::new("train.csv"), LossRole::Training, true)?;
    let pop = parse_loss_csv(multi_csv, Path::new("pop.csv"), LossRole::Population, true)?;
    println!("training losses   {:?}", train.values());
    println!("population losses {:?}", pop.values());

    let (tt, tp) = transform_losses(&train, &pop, DEFAULT_ALPHA)?;
    println!("transform {:?}", tt.transform);
    println!("transformed training   {:.4?}", tt.values);
    println!("transformed population {:.4?}", tp.values);
    Ok(())
}
