//! Ordered class thresholds and interval assignment.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default magnitude of the outer sentinels `theta_0 = -LARGE`, `theta_H = +LARGE`.
pub const DEFAULT_SENTINEL: f64 = 1e30;

/// `H - 1` strictly increasing interior thresholds delimiting `H` classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassStructure {
    thresholds: Vec<f64>,
    #[serde(default = "default_sentinel")]
    sentinel: f64,
}

fn default_sentinel() -> f64 {
    DEFAULT_SENTINEL
}

impl ClassStructure {
    pub fn new(thresholds: Vec<f64>) -> Result<Self> {
        Self::with_sentinel(thresholds, DEFAULT_SENTINEL)
    }

    pub fn with_sentinel(thresholds: Vec<f64>, sentinel: f64) -> Result<Self> {
        if !(sentinel.is_finite() && sentinel > 0.0) {
            return Err(Error::InvalidArgument(format!("bad sentinel {sentinel}")));
        }
        if thresholds.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFiniteValue("class thresholds".into()));
        }
        if thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "thresholds must be strictly increasing: {thresholds:?}"
            )));
        }
        Ok(Self { thresholds, sentinel })
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn sentinel(&self) -> f64 {
        self.sentinel
    }

    pub fn class_count(&self) -> usize {
        self.thresholds.len() + 1
    }

    /// `theta_h` for `h` in `0..=H`, with the sentinels at both ends.
    pub fn bound(&self, h: usize) -> f64 {
        if h == 0 {
            -self.sentinel
        } else if h > self.thresholds.len() {
            self.sentinel
        } else {
            self.thresholds[h - 1]
        }
    }

    /// Class `h` (1-based) with `theta_{h-1} <= u < theta_h`. A value equal
    /// to an interior threshold belongs to the upper class.
    pub fn assign(&self, u: f64) -> usize {
        1 + self.thresholds.iter().take_while(|&&theta| theta <= u).count()
    }

    /// Applies `theta' = (theta - offset) / scale` to every interior threshold.
    pub fn transform(&self, scale: f64, offset: f64) -> Result<Self> {
        transform_thresholds(self, scale, offset)
    }
}

pub fn transform_thresholds(classes: &ClassStructure, scale: f64, offset: f64) -> Result<ClassStructure> {
    if !(scale > 0.0) {
        return Err(Error::ZeroScale);
    }
    let thresholds = classes.thresholds.iter().map(|t| (t - offset) / scale).collect();
    ClassStructure::with_sentinel(thresholds, classes.sentinel)
}
