use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised anywhere in the audit pipeline.
///
/// Variants split into two classes, see [`Error::class`]: problems with what
/// the caller supplied (bad flags, malformed files, out-of-range parameters)
/// and numerical problems with the data itself (degenerate samples, curves
/// that clamp to nothing).
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape error: label has {label} entries but prediction has {prediction}")]
    Shape { label: usize, prediction: usize },

    #[error("degenerate losses: every loss equals {0}, nothing to normalize")]
    DegenerateLosses(f64),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("empty rate curve: {0}")]
    EmptyCurve(String),

    #[error("empty ensemble: at least one model row is required")]
    EmptyEnsemble,

    #[error("empty sample: {0}")]
    EmptySample(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("unknown output format `{0}` (expected json, csv or svg)")]
    UnknownFormat(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid manifest: {0}")]
    Manifest(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization: {0}")]
    Serialize(String),
}

/// Coarse classification used to pick process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Input,
    Numeric,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Domain(_)
            | Error::Shape { .. }
            | Error::UnknownFormat(_)
            | Error::Parse { .. }
            | Error::Manifest(_)
            | Error::Io { .. }
            | Error::Serialize(_)
            | Error::EmptySample(_)
            | Error::InsufficientData(_) => ErrorClass::Input,
            Error::DegenerateLosses(_)
            | Error::DegenerateSample(_)
            | Error::EmptyCurve(_)
            | Error::EmptyEnsemble => ErrorClass::Numeric,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

/// Checks that `p` is a probability in `[0, 1)`, the admissible range for δ.
pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if (0.0..1.0).contains(&delta) {
        Ok(())
    } else {
        Err(Error::domain(format!("delta must lie in [0, 1), got {delta}")))
    }
}
