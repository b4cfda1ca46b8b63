//! Monotonic recurrent network with per-criterion hidden states, learnable
//! discount gates and an ordinal threshold head.

mod backward;
mod export;
mod forward;
mod loss;
mod params;
mod train;

use crate::dataset::Alternative;
use crate::error::{Error, Result};
use crate::grid::{encode, EncodedAlternative, Grid, Shape};

pub use backward::gradients;
pub use export::export_marginals;
pub use forward::{comprehensive_value, forward, recurrence_step, ForwardTrace};
pub use loss::{class_probabilities, ordinal_loss, PROB_FLOOR};
pub use params::{CriterionParams, MrnnConfig, MrnnParams, THRESHOLD_GAP};
pub use train::{mean_loss, train, TrainReport};

/// Class of an encoded alternative by comparing `U` with the thresholds.
pub fn assign_encoded(params: &MrnnParams, config: &MrnnConfig, encoded: &EncodedAlternative) -> Result<usize> {
    let u = comprehensive_value(params, config, encoded)?;
    Ok(params.class_structure()?.assign(u))
}

pub fn predict(params: &MrnnParams, config: &MrnnConfig, grid: &Grid, alt: &Alternative) -> Result<usize> {
    let expected = Shape::new(config.criteria, config.horizon, config.gamma);
    if grid.shape() != expected {
        return Err(Error::dims(format!("{expected:?}"), format!("{:?}", grid.shape())));
    }
    assign_encoded(params, config, &encode(alt, grid)?)
}
