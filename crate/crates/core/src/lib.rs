pub mod distfit;
pub mod epsilon;
pub mod error;
pub mod goodness_of_fit;
pub mod io;
pub mod landscape;
pub mod loss_model;
pub mod mechanism;
pub mod seeds;
pub mod simulation;
mod svg;

pub use error::{Error, ErrorClass, Result};
