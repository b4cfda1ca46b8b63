//! A trained model of either family, bundled with the grid it was fit on.

use serde::{Deserialize, Serialize};

use crate::dataset::Alternative;
use crate::error::Result;
use crate::grid::{encode, EncodedAlternative, Grid};
use crate::mrnn::{self, MrnnConfig, MrnnParams};
use crate::tpl::TplModel;

/// One row of a plot-ready sub-marginal table (1-based indices).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalRow {
    pub criterion: usize,
    pub timestamp: usize,
    pub point_index: usize,
    pub g_value: f64,
    pub sub_marginal: f64,
}

/// Learned discount applied after `timestamp` (1-based) for one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscountRow {
    pub sample_id: String,
    pub criterion: usize,
    pub timestamp: usize,
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    Tpl(TplModel),
    Mrnn { config: MrnnConfig, params: MrnnParams },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub grid: Grid,
    pub kind: ModelKind,
}

impl TrainedModel {
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ModelKind::Tpl(_) => "tpl",
            ModelKind::Mrnn { .. } => "mrnn",
        }
    }

    pub fn value_encoded(&self, encoded: &EncodedAlternative) -> Result<f64> {
        match &self.kind {
            ModelKind::Tpl(m) => m.value(encoded),
            ModelKind::Mrnn { config, params } => mrnn::comprehensive_value(params, config, encoded),
        }
    }

    pub fn value(&self, alt: &Alternative) -> Result<f64> {
        self.value_encoded(&encode(alt, &self.grid)?)
    }

    pub fn assign_encoded(&self, encoded: &EncodedAlternative) -> Result<usize> {
        match &self.kind {
            ModelKind::Tpl(m) => m.assign_encoded(encoded),
            ModelKind::Mrnn { config, params } => mrnn::assign_encoded(params, config, encoded),
        }
    }

    pub fn predict(&self, alt: &Alternative) -> Result<usize> {
        self.assign_encoded(&encode(alt, &self.grid)?)
    }

    pub fn predict_all(&self, alts: &[Alternative]) -> Result<Vec<usize>> {
        alts.iter().map(|a| self.predict(a)).collect()
    }

    /// Sub-marginal table and, for the network, per-sample discount traces.
    pub fn export(&self, sample: &[EncodedAlternative]) -> Result<(Vec<MarginalRow>, Option<Vec<DiscountRow>>)> {
        match &self.kind {
            ModelKind::Tpl(m) => {
                let shape = m.pvf.shape();
                let mut rows = Vec::with_capacity(shape.cells() * (shape.gamma + 1));
                for j in 0..shape.criteria {
                    for t in 0..shape.horizon {
                        for (k, g) in self.grid.points(j, t).iter().enumerate() {
                            rows.push(MarginalRow {
                                criterion: j + 1,
                                timestamp: t + 1,
                                point_index: k,
                                g_value: *g,
                                sub_marginal: m.pvf.value_at_point(j, t, k),
                            });
                        }
                    }
                }
                Ok((rows, None))
            }
            ModelKind::Mrnn { config, params } => {
                let (rows, discounts) = mrnn::export_marginals(params, config, &self.grid, sample)?;
                Ok((rows, Some(discounts)))
            }
        }
    }
}
