//! Threshold-based sorting of alternatives described by multi-criteria time
//! series, learned either as a discounted additive value model solved as a
//! quadratic program or as a monotonic recurrent network.

pub mod classes;
pub mod dataset;
pub mod dgp;
pub mod error;
pub mod eval;
pub mod grid;
pub mod io;
pub mod model;
pub mod mrnn;
pub mod numeric;
pub mod tpl;
pub mod value;

pub use classes::{transform_thresholds, ClassStructure, DEFAULT_SENTINEL};
pub use dataset::{Alternative, Dataset};
pub use error::{Error, Result};
pub use grid::{build_grid, encode, encode_all, EncodedAlternative, Grid, Shape};
pub use model::{ModelKind, TrainedModel};
pub use value::{normalize, DiscountSchedule, Normalized, PiecewiseValueFunction};
