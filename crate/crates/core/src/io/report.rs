use serde::{Deserialize, Serialize};

use crate::epsilon::{AuditOutcome, EpsilonStarResult};
use crate::error::{Error, Result};
use crate::mechanism::MechanismReport;

pub const AUDIT_SCHEMA: &str = "epsilon-star.audit/1";
pub const MECHANISM_SCHEMA: &str = "epsilon-star.mechanism/1";

/// Everything needed to replay a computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    /// The configuration exactly as used.
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    /// Input files as given on the command line or in the manifest.
    pub inputs: Vec<String>,
    pub clamp: ClampDiagnostics,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClampDiagnostics {
    pub window: Option<(f64, f64)>,
    pub pairs_total: usize,
    pub pairs_clamped: usize,
}

impl Provenance {
    pub fn new(config: &impl Serialize, seeds: Vec<u64>, inputs: Vec<String>) -> Result<Self> {
        Ok(Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config: serde_json::to_value(config).map_err(|e| Error::Serialize(e.to_string()))?,
            seeds,
            inputs,
            clamp: ClampDiagnostics::default(),
        })
    }

    pub fn with_clamp(mut self, r: &EpsilonStarResult) -> Self {
        self.clamp = ClampDiagnostics {
            window: Some(r.clamp_window),
            pairs_total: r.diagnostics.pairs_total,
            pairs_clamped: r.diagnostics.pairs_clamped,
        };
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub schema: String,
    #[serde(flatten)]
    pub outcome: AuditOutcome,
    pub provenance: Provenance,
}

impl AuditReport {
    pub fn new(outcome: AuditOutcome, provenance: Provenance) -> Self {
        let provenance = provenance.with_clamp(&outcome.result);
        Self {
            schema: AUDIT_SCHEMA.into(),
            outcome,
            provenance,
        }
    }

    pub fn epsilon_star(&self) -> f64 {
        self.outcome.result.epsilon_star
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MechanismDocument {
    pub schema: String,
    pub model_ids: Vec<String>,
    #[serde(flatten)]
    pub report: MechanismReport,
    pub provenance: Provenance,
}

impl MechanismDocument {
    pub fn new(model_ids: Vec<String>, report: MechanismReport, provenance: Provenance) -> Self {
        Self {
            schema: MECHANISM_SCHEMA.into(),
            model_ids,
            report,
            provenance,
        }
    }
}

pub fn to_json_pretty(v: &impl Serialize) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::Serialize(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn from_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Serialize(e.to_string()))
}
