//! Classification metrics, rotation cross-validation and the experiment loop.

mod experiment;
mod metrics;
mod split;

pub use experiment::{
    evaluate_encoded, evaluate_model, fit_model, run_experiment, ExperimentReport, ExperimentSpec, FoldReport,
    ModelSpec, Selection, Summary, TplSpec, REPORT_SCHEMA_VERSION,
};
pub use metrics::{confusion, metrics, ConfusionMatrix, MetricsReport};
pub use split::{kfold_split, Fold, FoldSplit, SplitRatios};
