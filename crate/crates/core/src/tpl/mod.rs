//! Temporal preference learning with a fixed discount: pairwise hinge QP,
//! primal and dual solvers, threshold placement and prediction.

mod dual;
mod kkt;
mod pairs;
mod primal;
mod thresholds;

use serde::{Deserialize, Serialize};

use crate::classes::ClassStructure;
use crate::dataset::Alternative;
use crate::error::{Error, Result};
use crate::grid::{encode, EncodedAlternative, Grid, Shape};
use crate::value::{normalize, DiscountSchedule, PiecewiseValueFunction};

pub use dual::solve_dual;
pub use kkt::{dual_objective, kkt_residual, primal_objective};
pub use pairs::{derive_pairs, PairwiseSample, DEFAULT_PAIR_CAP};
pub use primal::solve_primal;
pub use thresholds::{fit_from_scores, FittedThresholds};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub c: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl SolverOptions {
    pub fn new(c: f64) -> Self {
        Self { c, ..Self::default() }
    }
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { c: 1.0, tol: 1e-6, max_iter: 50_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    /// Primal objective `1/2 ||u||^2 + C sum xi` at the returned `u`.
    pub objective: f64,
    pub dual_mu: Option<Vec<f64>>,
    /// `sigma = u - sum_i y_i mu_i v_i`, non-negative at a dual solution.
    pub dual_slack: Option<Vec<f64>>,
    pub iterations: usize,
    pub converged: bool,
    pub kkt_residual: f64,
}

impl SolverReport {
    pub fn ensure_converged(&self) -> Result<()> {
        if self.converged {
            Ok(())
        } else {
            Err(Error::NotConverged { iterations: self.iterations, residual: self.kkt_residual })
        }
    }
}

fn check_problem(pairs: &[PairwiseSample], shape: Shape, options: &SolverOptions) -> Result<()> {
    if pairs.is_empty() {
        return Err(Error::InvalidArgument("no pairs to fit".into()));
    }
    if !(options.c > 0.0 && options.c.is_finite()) {
        return Err(Error::InvalidArgument(format!("C must be positive, got {}", options.c)));
    }
    if !(options.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", options.tol)));
    }
    if let Some(p) = pairs.iter().find(|p| p.v_diff.len() != shape.len()) {
        return Err(Error::dims(shape.len(), p.v_diff.len()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Primal,
    #[default]
    Dual,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TplOptions {
    pub tau: f64,
    pub solver: SolverKind,
    pub solver_options: SolverOptions,
    pub pair_cap: Option<usize>,
    pub seed: u64,
}

impl Default for TplOptions {
    fn default() -> Self {
        Self {
            tau: 0.5,
            solver: SolverKind::Dual,
            solver_options: SolverOptions::default(),
            pair_cap: Some(DEFAULT_PAIR_CAP),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TplModel {
    pub pvf: PiecewiseValueFunction,
    pub schedule: DiscountSchedule,
    pub classes: ClassStructure,
    pub c_param: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TplFitReport {
    pub solver: SolverReport,
    pub pairs: usize,
    pub fallback_boundaries: Vec<usize>,
    pub thresholds_repaired: bool,
    /// False when the solution was identically zero and could not be rescaled.
    pub normalized: bool,
}

/// `U(a)` for every encoded alternative paired with its id and label.
fn scores<'a>(
    pvf: &PiecewiseValueFunction,
    schedule: &DiscountSchedule,
    encoded: &'a [EncodedAlternative],
) -> Result<Vec<(&'a str, f64, usize)>> {
    encoded
        .iter()
        .map(|e| {
            let label = e
                .label
                .ok_or_else(|| Error::InvalidArgument(format!("alternative `{}` has no label", e.id)))?;
            Ok((e.id.as_str(), pvf.comprehensive_value(e, schedule)?, label))
        })
        .collect()
}

/// Midpoint thresholds for a value function on a labelled training set.
pub fn fit_thresholds(
    pvf: &PiecewiseValueFunction,
    schedule: &DiscountSchedule,
    encoded: &[EncodedAlternative],
    class_count: usize,
) -> Result<FittedThresholds> {
    fit_from_scores(&scores(pvf, schedule, encoded)?, class_count)
}

impl TplModel {
    /// Solves the QP on all ordered pairs of `encoded`, places thresholds and
    /// returns the model rescaled to zero minima and unit range.
    pub fn fit(
        encoded: &[EncodedAlternative],
        class_count: usize,
        options: &TplOptions,
    ) -> Result<(Self, TplFitReport)> {
        let first = encoded.first().ok_or(Error::EmptyDataset)?;
        let shape = first.shape();
        let schedule = DiscountSchedule::for_shape(options.tau, shape)?;
        let pairs = derive_pairs(encoded, &schedule, options.pair_cap, options.seed)?;
        let (pvf, solver) = match options.solver {
            SolverKind::Primal => solve_primal(&pairs, shape, &options.solver_options)?,
            SolverKind::Dual => solve_dual(&pairs, shape, &options.solver_options)?,
        };
        let fitted = fit_thresholds(&pvf, &schedule, encoded, class_count)?;
        let raw = TplModel { pvf, schedule, classes: fitted.classes, c_param: options.solver_options.c };
        let (model, normalized) = match raw.normalized() {
            Ok(m) => (m, true),
            Err(Error::ZeroScale) => (raw, false),
            Err(e) => return Err(e),
        };
        let report = TplFitReport {
            solver,
            pairs: pairs.len(),
            fallback_boundaries: fitted.fallback_boundaries,
            thresholds_repaired: fitted.repaired,
            normalized,
        };
        Ok((model, report))
    }

    /// Equivalent model with normalized value functions and mapped thresholds.
    pub fn normalized(&self) -> Result<Self> {
        let n = normalize(&self.pvf, &self.schedule)?;
        Ok(TplModel {
            pvf: n.pvf,
            schedule: self.schedule.clone(),
            classes: self.classes.transform(n.scale, n.offset)?,
            c_param: self.c_param,
        })
    }

    pub fn value(&self, encoded: &EncodedAlternative) -> Result<f64> {
        self.pvf.comprehensive_value(encoded, &self.schedule)
    }

    pub fn assign_encoded(&self, encoded: &EncodedAlternative) -> Result<usize> {
        Ok(self.classes.assign(self.value(encoded)?))
    }

    pub fn predict(&self, alt: &Alternative, grid: &Grid) -> Result<usize> {
        if grid.shape() != self.pvf.shape() {
            return Err(Error::dims(format!("{:?}", self.pvf.shape()), format!("{:?}", grid.shape())));
        }
        self.assign_encoded(&encode(alt, grid)?)
    }
}
