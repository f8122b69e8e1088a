use serde::{Deserialize, Serialize};

use crate::epsilon::{auto_delta, Method, DEFAULT_GRID_SIZE};
use crate::error::{check_delta, Error, Result};
use crate::loss_model::DEFAULT_ALPHA;

/// How δ is chosen: a fixed probability or `1 / (n ln n)` from the training
/// set size. Serialized as a number or the string `"auto"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeltaPolicy {
    Fixed(f64),
    Auto(AutoKeyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AutoKeyword {
    #[serde(rename = "auto")]
    Auto,
}

impl DeltaPolicy {
    pub const AUTO: DeltaPolicy = DeltaPolicy::Auto(AutoKeyword::Auto);

    pub fn resolve(&self, n_train: usize) -> Result<f64> {
        match *self {
            DeltaPolicy::Fixed(d) => {
                check_delta(d)?;
                Ok(d)
            }
            DeltaPolicy::Auto(_) => auto_delta(n_train),
        }
    }
}

impl std::str::FromStr for DeltaPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(DeltaPolicy::AUTO);
        }
        let d: f64 = s
            .parse()
            .map_err(|_| Error::domain(format!("delta must be a probability or `auto`, got `{s}`")))?;
        check_delta(d)?;
        Ok(DeltaPolicy::Fixed(d))
    }
}

/// Settings for one audit; echoed verbatim into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub delta: DeltaPolicy,
    pub method: Method,
    /// Threshold count for the ecdf method.
    pub grid_size: usize,
    pub alpha_shift: f64,
    /// Clip predicted probabilities into `[1e-12, 1 - 1e-12]` before taking logs.
    pub clip_predictions: bool,
    pub seed: u64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            delta: DeltaPolicy::AUTO,
            method: Method::Parametric,
            grid_size: DEFAULT_GRID_SIZE,
            alpha_shift: DEFAULT_ALPHA,
            clip_predictions: true,
            seed: 0,
        }
    }
}

impl AuditConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_size < 2 {
            return Err(Error::domain(format!("grid_size must be at least 2, got {}", self.grid_size)));
        }
        if !(self.alpha_shift.is_finite() && self.alpha_shift > 0.0) {
            return Err(Error::domain(format!("alpha_shift must be positive, got {}", self.alpha_shift)));
        }
        if let DeltaPolicy::Fixed(d) = self.delta {
            check_delta(d)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_policy_parses_and_serializes() {
        assert_eq!("auto".parse::<DeltaPolicy>().unwrap(), DeltaPolicy::AUTO);
        assert_eq!("1e-5".parse::<DeltaPolicy>().unwrap(), DeltaPolicy::Fixed(1e-5));
        assert!("1.5".parse::<DeltaPolicy>().is_err());
        assert!("x".parse::<DeltaPolicy>().is_err());
        assert_eq!(serde_json::to_string(&DeltaPolicy::AUTO).unwrap(), "\"auto\"");
        assert_eq!(serde_json::from_str::<DeltaPolicy>("0.25").unwrap(), DeltaPolicy::Fixed(0.25));
        assert_eq!(serde_json::from_str::<DeltaPolicy>("\"auto\"").unwrap(), DeltaPolicy::AUTO);
    }

    #[test]
    fn auto_resolves_from_train_size() {
        let d = DeltaPolicy::AUTO.resolve(1000).unwrap();
        assert!((d - 1.0 / (1000.0 * 1000f64.ln())).abs() < 1e-18);
        assert!(DeltaPolicy::Fixed(1.0).resolve(10).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(AuditConfig::default().validate().is_ok());
        let bad = AuditConfig {
            grid_size: 1,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let cfg: AuditConfig = serde_json::from_str(&serde_json::to_string(&AuditConfig::default()).unwrap()).unwrap();
        assert_eq!(cfg, AuditConfig::default());
    }
}
