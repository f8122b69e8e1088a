use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One model instance: a pair of loss files plus optional metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub model_id: String,
    /// Training-set loss file, relative to the manifest.
    pub train: PathBuf,
    /// Population loss file, relative to the manifest.
    pub pop: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utility: Option<f64>,
    /// Instances sharing a strategy are aggregated in landscapes; defaults
    /// to the model id.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tags: BTreeMap<String, String>,
}

impl ManifestEntry {
    pub fn strategy_id(&self) -> &str {
        self.strategy.as_deref().unwrap_or(&self.model_id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
    /// Directory relative paths resolve against; not serialized.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Manifest {
    pub fn parse(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut m: Manifest = serde_json::from_str(text).map_err(|e| Error::Manifest(e.to_string()))?;
        m.base_dir = base_dir.into();
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, base)
    }

    pub fn validate(&self) -> Result<()> {
        if self.entries.is_empty() {
            return Err(Error::Manifest("no entries".into()));
        }
        let mut seen = BTreeSet::new();
        for e in &self.entries {
            if e.model_id.is_empty() {
                return Err(Error::Manifest("empty model_id".into()));
            }
            if !seen.insert(e.model_id.as_str()) {
                return Err(Error::Manifest(format!("duplicate model_id `{}`", e.model_id)));
            }
            if let Some(u) = e.utility {
                if !u.is_finite() {
                    return Err(Error::Manifest(format!("model `{}` has a non-finite utility", e.model_id)));
                }
            }
        }
        Ok(())
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Fails on the first entry whose files do not exist.
    pub fn check_paths(&self) -> Result<()> {
        for e in &self.entries {
            for p in [&e.train, &e.pop] {
                let full = self.resolve(p);
                if !full.is_file() {
                    return Err(Error::Manifest(format!(
                        "model `{}`: {} is not a readable file",
                        e.model_id,
                        full.display()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialize(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_resolve() {
        let m = Manifest::parse(
            r#"{"entries": [{"model_id": "a", "train": "a_tr.csv", "pop": "/abs/a_pop.csv", "utility": 0.8,
                "tags": {"dp_epsilon": "1"}}]}"#,
            "/data",
        )
        .unwrap();
        assert_eq!(m.resolve(&m.entries[0].train), PathBuf::from("/data/a_tr.csv"));
        assert_eq!(m.resolve(&m.entries[0].pop), PathBuf::from("/abs/a_pop.csv"));
        assert_eq!(m.entries[0].strategy_id(), "a");
        assert!(m.check_paths().is_err());
    }

    #[test]
    fn rejects_bad_manifests() {
        for text in [
            r#"{"entries": []}"#,
            r#"{"entries": [{"model_id": "a", "train": "x", "pop": "y"}, {"model_id": "a", "train": "x", "pop": "y"}]}"#,
            r#"{"entries": [{"model_id": "a", "train": "x"}]}"#,
            r#"{"entries": [{"model_id": "a", "train": "x", "pop": "y", "extra": 1}]}"#,
            "not json",
        ] {
            assert!(matches!(Manifest::parse(text, "."), Err(Error::Manifest(_))), "{text}");
        }
    }
}
