use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::classes::ClassStructure;
use crate::error::{Error, Result};
use crate::grid::{Grid, Shape};
use crate::model::{ModelKind, TrainedModel};
use crate::mrnn::{MrnnConfig, MrnnParams};
use crate::tpl::TplModel;
use crate::value::{DiscountSchedule, PiecewiseValueFunction};

pub const MODEL_SCHEMA_VERSION: i64 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct GridFile {
    criteria: usize,
    horizon: usize,
    gamma: usize,
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TplPayload {
    delta_f: Vec<f64>,
    offsets: Vec<f64>,
    tau: f64,
    thresholds: Vec<f64>,
    sentinel: f64,
    c_param: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MrnnPayload {
    config: MrnnConfig,
    /// Raw parameters, including the unconstrained threshold base and increments.
    params: MrnnParams,
}

#[derive(Debug, Serialize, Deserialize)]
struct ModelFile {
    kind: String,
    schema_version: i64,
    grid: GridFile,
    payload: Value,
}

pub fn model_to_json(model: &TrainedModel) -> Result<String> {
    let shape = model.grid.shape();
    let grid = GridFile {
        criteria: shape.criteria,
        horizon: shape.horizon,
        gamma: shape.gamma,
        alpha: model.grid.alphas().to_vec(),
        beta: model.grid.betas().to_vec(),
    };
    let payload = match &model.kind {
        ModelKind::Tpl(m) => serde_json::to_value(TplPayload {
            delta_f: m.pvf.increments().to_vec(),
            offsets: m.pvf.offsets().to_vec(),
            tau: m.schedule.tau(),
            thresholds: m.classes.thresholds().to_vec(),
            sentinel: m.classes.sentinel(),
            c_param: m.c_param,
        })?,
        ModelKind::Mrnn { config, params } => {
            serde_json::to_value(MrnnPayload { config: config.clone(), params: params.clone() })?
        }
    };
    let file = ModelFile { kind: model.kind_name().into(), schema_version: MODEL_SCHEMA_VERSION, grid, payload };
    Ok(serde_json::to_string_pretty(&file)?)
}

/// Parses a model document. The version and kind are checked before the
/// payload is interpreted.
pub fn model_from_json(text: &str, path: &Path) -> Result<TrainedModel> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        row: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let version = doc.get("schema_version").and_then(Value::as_i64).unwrap_or(-1);
    if version != MODEL_SCHEMA_VERSION {
        return Err(Error::SchemaVersionMismatch { found: version, expected: MODEL_SCHEMA_VERSION });
    }
    let kind = doc.get("kind").and_then(Value::as_str).unwrap_or("").to_string();
    if kind != "tpl" && kind != "mrnn" {
        return Err(Error::Kind(kind));
    }
    let file: ModelFile = serde_json::from_value(doc)?;
    let g = file.grid;
    let shape = Shape::new(g.criteria, g.horizon, g.gamma);
    let grid = Grid::from_bounds(shape, g.alpha, g.beta)?;
    let kind = if kind == "tpl" {
        let p: TplPayload = serde_json::from_value(file.payload).map_err(|e| Error::Kind(format!("tpl: {e}")))?;
        ModelKind::Tpl(TplModel {
            pvf: PiecewiseValueFunction::new(shape, p.delta_f, p.offsets)?,
            schedule: DiscountSchedule::for_shape(p.tau, shape)?,
            classes: ClassStructure::with_sentinel(p.thresholds, p.sentinel)?,
            c_param: p.c_param,
        })
    } else {
        let p: MrnnPayload = serde_json::from_value(file.payload).map_err(|e| Error::Kind(format!("mrnn: {e}")))?;
        p.config.validate()?;
        p.params.check_shape(&p.config)?;
        let cfg = &p.config;
        if (cfg.criteria, cfg.horizon, cfg.gamma) != (shape.criteria, shape.horizon, shape.gamma) {
            return Err(Error::dims(
                format!("{}x{}x{}", shape.criteria, shape.horizon, shape.gamma),
                format!("{}x{}x{}", cfg.criteria, cfg.horizon, cfg.gamma),
            ));
        }
        ModelKind::Mrnn { config: p.config, params: p.params }
    };
    Ok(TrainedModel { grid, kind })
}

pub fn save_model(model: &TrainedModel, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, model_to_json(model)?)?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<TrainedModel> {
    let path = path.as_ref();
    model_from_json(&fs::read_to_string(path)?, path)
}
