//! Piecewise-linear sub-marginal value functions and fixed-discount aggregation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{EncodedAlternative, Shape};

/// Non-negative increments `df[j][t][k]` between consecutive characteristic
/// points, plus the value at the first point of each cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseValueFunction {
    shape: Shape,
    delta_f: Vec<f64>,
    offsets: Vec<f64>,
}

impl PiecewiseValueFunction {
    pub fn new(shape: Shape, delta_f: Vec<f64>, offsets: Vec<f64>) -> Result<Self> {
        if delta_f.len() != shape.len() {
            return Err(Error::dims(format!("{} increments", shape.len()), delta_f.len()));
        }
        if offsets.len() != shape.cells() {
            return Err(Error::dims(format!("{} offsets", shape.cells()), offsets.len()));
        }
        if delta_f.iter().chain(&offsets).any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteValue("value function".into()));
        }
        if let Some(bad) = delta_f.iter().find(|&&x| x < 0.0) {
            return Err(Error::InvalidArgument(format!("negative increment {bad}")));
        }
        Ok(Self { shape, delta_f, offsets })
    }

    /// Zero offsets; the form every freshly solved model takes.
    pub fn from_increments(shape: Shape, delta_f: Vec<f64>) -> Result<Self> {
        Self::new(shape, delta_f, vec![0.0; shape.cells()])
    }

    pub fn zeros(shape: Shape) -> Self {
        Self { shape, delta_f: vec![0.0; shape.len()], offsets: vec![0.0; shape.cells()] }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn increments(&self) -> &[f64] {
        &self.delta_f
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn cell_increments(&self, criterion: usize, t: usize) -> &[f64] {
        let start = self.shape.index(criterion, t, 0);
        &self.delta_f[start..start + self.shape.gamma]
    }

    pub fn offset(&self, criterion: usize, t: usize) -> f64 {
        self.offsets[self.shape.cell(criterion, t)]
    }

    /// `f_j^t(x^k)`: the value at characteristic point `k` (0..=gamma).
    pub fn value_at_point(&self, criterion: usize, t: usize, k: usize) -> f64 {
        self.offset(criterion, t) + self.cell_increments(criterion, t)[..k].iter().sum::<f64>()
    }

    /// `f_j^t(x^gamma) - f_j^t(x^0)`.
    pub fn cell_range(&self, criterion: usize, t: usize) -> f64 {
        self.cell_increments(criterion, t).iter().sum()
    }

    pub fn sub_marginal(&self, encoded: &EncodedAlternative, criterion: usize, t: usize) -> f64 {
        let v = encoded.cell(criterion, t);
        self.offset(criterion, t)
            + self.cell_increments(criterion, t).iter().zip(v).map(|(df, v)| df * v).sum::<f64>()
    }

    /// `U(a) = sum_j sum_t tau^(T-t) f_j^t(g_j^t(a))`.
    pub fn comprehensive_value(
        &self,
        encoded: &EncodedAlternative,
        schedule: &DiscountSchedule,
    ) -> Result<f64> {
        if encoded.shape() != self.shape {
            return Err(Error::dims(format!("{:?}", self.shape), format!("{:?}", encoded.shape())));
        }
        if schedule.criteria() != self.shape.criteria || schedule.horizon() != self.shape.horizon {
            return Err(Error::dims(
                format!("schedule for {}x{}", self.shape.criteria, self.shape.horizon),
                format!("{}x{}", schedule.criteria(), schedule.horizon()),
            ));
        }
        let mut total = 0.0;
        for j in 0..self.shape.criteria {
            for t in 0..self.shape.horizon {
                total += schedule.weight(j, t) * self.sub_marginal(encoded, j, t);
            }
        }
        Ok(total)
    }

    /// Sum over criteria of the discounted lowest cell values. Equals `U` of
    /// an alternative sitting at every cell's worst observed performance.
    pub fn base_value(&self, schedule: &DiscountSchedule) -> f64 {
        let mut total = 0.0;
        for j in 0..self.shape.criteria {
            for t in 0..self.shape.horizon {
                total += schedule.weight(j, t) * self.offset(j, t);
            }
        }
        total
    }
}

/// Geometric discount weights `tau^(T-t)` for 1-based `t`; the last
/// timestamp always has weight 1 (including `tau = 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscountSchedule {
    tau: f64,
    criteria: usize,
    horizon: usize,
    weights: Vec<f64>,
}

impl DiscountSchedule {
    pub fn new(tau: f64, criteria: usize, horizon: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::InvalidArgument(format!("tau {tau} is outside [0, 1]")));
        }
        let per_t: Vec<f64> = (0..horizon).map(|t| tau.powi((horizon - 1 - t) as i32)).collect();
        let weights = (0..criteria).flat_map(|_| per_t.iter().copied()).collect();
        Ok(Self { tau, criteria, horizon, weights })
    }

    pub fn for_shape(tau: f64, shape: Shape) -> Result<Self> {
        Self::new(tau, shape.criteria, shape.horizon)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn criteria(&self) -> usize {
        self.criteria
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    #[inline]
    pub fn weight(&self, criterion: usize, t: usize) -> f64 {
        self.weights[criterion * self.horizon + t]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Result of rescaling a value function to zero minima and unit total range.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub pvf: PiecewiseValueFunction,
    /// Total range `sum_{j,t} (f(x^gamma) - f(x^0))` of the input.
    pub scale: f64,
    /// `U` of the all-worst alternative under the input.
    pub offset: f64,
}

/// Maps `f` to `(f - f(x^0)) / scale`, so that `U' = (U - offset) / scale`.
pub fn normalize(pvf: &PiecewiseValueFunction, schedule: &DiscountSchedule) -> Result<Normalized> {
    let scale: f64 = pvf.increments().iter().sum();
    if !(scale > 0.0) {
        return Err(Error::ZeroScale);
    }
    let offset = pvf.base_value(schedule);
    let delta_f = pvf.increments().iter().map(|df| df / scale).collect();
    let shape = pvf.shape();
    Ok(Normalized { pvf: PiecewiseValueFunction::from_increments(shape, delta_f)?, scale, offset })
}
