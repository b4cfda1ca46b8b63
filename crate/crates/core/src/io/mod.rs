//! Dataset files, model files and exported tables.

mod dataset;
mod model;
mod tables;

pub use dataset::{column_name, load_dataset, read_dataset, save_assignments, save_dataset, write_dataset};
pub use model::{load_model, model_from_json, model_to_json, save_model, MODEL_SCHEMA_VERSION};
pub use tables::{export_tables, DISCOUNTS_FILE, MARGINALS_FILE};
