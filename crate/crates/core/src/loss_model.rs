//! Per-record losses from model predictions, and the logit transform applied
//! to loss sets before Normal fitting.
//!
//! The attack statistic is a signed log-odds loss: for a binary model with
//! predicted probability `f` of label 1,
//!
//! ```text
//! l(f, y) = (1 - 2y) * (ln f - ln(1 - f))
//! ```
//!
//! and for a `C`-class model the negated log-odds of the hot class. Loss sets
//! are then mapped through normalize → shift by α → `exp(-·)` → logit, which
//! turns a skewed, non-negative loss distribution into something a Normal
//! fits well. The composed map is strictly decreasing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Clip bound applied to saturated predictions at ingestion.
pub const PREDICTION_CLIP: f64 = 1e-12;

/// Default α added after normalization.
pub const DEFAULT_ALPHA: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub enum Label {
    /// Class index; 0 or 1 for binary models.
    Index(usize),
    /// One-hot encoding with exactly one component equal to 1.
    OneHot(Vec<u8>),
}

/// A model output together with the true label of the queried record.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRecord {
    pub prediction: Vec<f64>,
    pub label: Label,
}

impl PredictionRecord {
    /// Builds a record, optionally clipping saturated outputs into
    /// `[1e-12, 1 - 1e-12]`. Non-finite components are always rejected.
    pub fn new(mut prediction: Vec<f64>, label: Label, clip: bool) -> Result<Self> {
        if prediction.is_empty() {
            return Err(Error::domain("prediction vector is empty"));
        }
        for f in prediction.iter_mut() {
            if !f.is_finite() {
                return Err(Error::domain(format!("prediction {f} is not finite")));
            }
            if clip {
                *f = f.clamp(PREDICTION_CLIP, 1.0 - PREDICTION_CLIP);
            }
        }
        if let Label::OneHot(hot) = &label {
            if hot.iter().filter(|&&v| v == 1).count() != 1 || hot.iter().any(|&v| v > 1) {
                return Err(Error::domain("one-hot label must have exactly one component set"));
            }
        }
        Ok(Self { prediction, label })
    }

    pub fn n_classes(&self) -> usize {
        self.prediction.len()
    }

    fn hot_index(&self) -> Result<usize> {
        let c = self.prediction.len();
        match &self.label {
            Label::Index(j) if *j < c => Ok(*j),
            Label::Index(j) => Err(Error::Shape {
                label: j + 1,
                prediction: c,
            }),
            Label::OneHot(hot) if hot.len() != c => Err(Error::Shape {
                label: hot.len(),
                prediction: c,
            }),
            Label::OneHot(hot) => hot
                .iter()
                .position(|&v| v == 1)
                .ok_or_else(|| Error::domain("one-hot label has no hot component")),
        }
    }
}

fn log_odds(f: f64) -> Result<f64> {
    if f > 0.0 && f < 1.0 {
        Ok(f.ln() - (-f).ln_1p())
    } else {
        Err(Error::domain(format!(
            "prediction {f} outside (0, 1); clip saturated outputs at ingestion"
        )))
    }
}

/// `(1 - 2y)(ln f - ln(1 - f))` for a single-output binary model.
pub fn binary_loss(record: &PredictionRecord) -> Result<f64> {
    if record.n_classes() != 1 {
        return Err(Error::domain(format!(
            "binary loss needs one output, got {}",
            record.n_classes()
        )));
    }
    let y = match record.label {
        Label::Index(y @ (0 | 1)) => y,
        Label::Index(y) => return Err(Error::domain(format!("binary label must be 0 or 1, got {y}"))),
        Label::OneHot(_) => return Err(Error::domain("binary loss takes an index label")),
    };
    let sign = if y == 0 { 1.0 } else { -1.0 };
    Ok(sign * log_odds(record.prediction[0])?)
}

/// `-Σ_j (ln f_j - ln(1 - f_j)) · 1{y_j = 1}`.
pub fn multiclass_loss(record: &PredictionRecord) -> Result<f64> {
    let hot = record.hot_index()?;
    // every component must be a valid probability even though only one counts
    for &f in &record.prediction {
        log_odds(f)?;
    }
    Ok(-log_odds(record.prediction[hot])?)
}

/// Dispatches on the number of outputs.
pub fn record_loss(record: &PredictionRecord) -> Result<f64> {
    if record.n_classes() == 1 {
        binary_loss(record)
    } else {
        multiclass_loss(record)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossRole {
    Training,
    Population,
}

/// Per-record losses of one model on one data set.
#[derive(Debug, Clone, PartialEq)]
pub struct LossSet {
    values: Vec<f64>,
    pub role: LossRole,
    pub source_id: String,
}

impl LossSet {
    pub fn new(values: Vec<f64>, role: LossRole, source_id: impl Into<String>) -> Result<Self> {
        let source_id = source_id.into();
        if values.is_empty() {
            return Err(Error::EmptySample(format!("loss set `{source_id}` is empty")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!(
                "loss set `{source_id}` has non-finite value {} at index {i}",
                values[i]
            )));
        }
        Ok(Self {
            values,
            role,
            source_id,
        })
    }

    pub fn training(values: Vec<f64>) -> Result<Self> {
        Self::new(values, LossRole::Training, "training")
    }

    pub fn population(values: Vec<f64>) -> Result<Self> {
        Self::new(values, LossRole::Population, "population")
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Frozen parameters of the normalize → shift → exp → logit map.
///
/// Bounds are recorded at the first transform so later held-out losses can be
/// mapped consistently.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossTransform {
    pub norm_min: f64,
    pub norm_max: f64,
    pub shift_alpha: f64,
}

impl LossTransform {
    /// Bounds from the union of both sets.
    pub fn fit(train: &LossSet, pop: &LossSet, alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::domain(format!("shift alpha must be finite and >= 0, got {alpha}")));
        }
        let (lo, hi) = train
            .values()
            .iter()
            .chain(pop.values())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        if lo >= hi {
            return Err(Error::DegenerateLosses(lo));
        }
        Ok(Self {
            norm_min: lo,
            norm_max: hi,
            shift_alpha: alpha,
        })
    }

    pub fn apply(&self, loss: f64) -> Result<f64> {
        let shifted = (loss - self.norm_min) / (self.norm_max - self.norm_min) + self.shift_alpha;
        // p = exp(-shifted) must lie strictly inside (0, 1)
        if !(shifted > 0.0 && shifted.is_finite()) {
            return Err(Error::domain(format!(
                "loss {loss} maps to exp(-{shifted}), outside (0, 1)"
            )));
        }
        // logit(e^{-s}) = -s - ln(1 - e^{-s})
        Ok(-shifted - (-(-shifted).exp_m1()).ln())
    }

    pub fn apply_set(&self, set: &LossSet) -> Result<TransformedLossSet> {
        let values = set
            .values()
            .iter()
            .map(|&v| self.apply(v))
            .collect::<Result<Vec<_>>>()?;
        Ok(TransformedLossSet {
            values,
            transform: *self,
        })
    }
}

/// Losses in logit units, with the transform that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedLossSet {
    pub values: Vec<f64>,
    pub transform: LossTransform,
}

/// Applies the joint transform to a training and a population set.
pub fn transform_losses(
    train: &LossSet,
    pop: &LossSet,
    alpha: f64,
) -> Result<(TransformedLossSet, TransformedLossSet)> {
    let transform = LossTransform::fit(train, pop, alpha)?;
    Ok((transform.apply_set(train)?, transform.apply_set(pop)?))
}
