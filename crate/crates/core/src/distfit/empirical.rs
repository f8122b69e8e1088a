use crate::error::{Error, Result};

/// Right-continuous step CDF of a finite sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    sorted_values: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample("empirical distribution needs at least one value".into()));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::domain("empirical distribution got a NaN value"));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { sorted_values: values })
    }

    pub fn sorted_values(&self) -> &[f64] {
        &self.sorted_values
    }

    pub fn n(&self) -> usize {
        self.sorted_values.len()
    }

    /// Number of sample values `<= x`.
    pub fn count_le(&self, x: f64) -> usize {
        self.sorted_values.partition_point(|&v| v <= x)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.count_le(x) as f64 / self.n() as f64
    }

    pub fn sf(&self, x: f64) -> f64 {
        (self.n() - self.count_le(x)) as f64 / self.n() as f64
    }

    /// Smallest sample value `x` with `cdf(x) >= t`.
    pub fn quantile(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::domain(format!("empirical quantile level must lie in (0, 1], got {t}")));
        }
        let n = self.n();
        let k = ((t * n as f64).ceil() as usize).clamp(1, n);
        Ok(self.sorted_values[k - 1])
    }
}

/// Fraction of the sample at or below `x`.
pub fn ecdf_eval(d: &EmpiricalDistribution, x: f64) -> f64 {
    d.cdf(x)
}
