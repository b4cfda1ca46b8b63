use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use tempsort::dgp::{generate, DgpConfig, DgpKind};
use tempsort::eval::{evaluate_model, fit_model, run_experiment, ConfusionMatrix, ExperimentSpec, MetricsReport, Selection};
use tempsort::io::{export_tables, load_dataset, load_model, save_assignments, save_dataset, save_model};
use tempsort::Dataset;

use crate::config::RunConfig;
use crate::UsageError;

pub const MODEL_FILE: &str = "model.json";
pub const REPORT_JSON: &str = "report.json";
pub const REPORT_TEXT: &str = "report.txt";
pub const EVALUATION_SCHEMA_VERSION: u32 = 1;

pub fn read_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())).into())
}

/// The configured dataset: read from `dataset.path` or generated from `dgp`.
pub fn load_data(config: &RunConfig) -> Result<Dataset> {
    match (&config.dataset, &config.dgp) {
        (Some(_), Some(_)) => Err(UsageError("set either [dataset] or [dgp], not both".into()).into()),
        (Some(d), None) => {
            load_dataset(&d.path, d.class_count).with_context(|| format!("loading {}", d.path.display()))
        }
        (None, dgp) => Ok(generate(&dgp.clone().unwrap_or_default().to_config())?.0),
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

pub fn generate_cmd(kind: DgpKind, n: usize, seed: u64, criteria: usize, horizon: usize, out: &Path) -> Result<()> {
    let (data, _) = generate(&DgpConfig { kind, n_samples: n, criteria, horizon, seed })?;
    save_dataset(&data, out).with_context(|| format!("writing {}", out.display()))?;
    let counts = data.class_counts();
    let shares: Vec<String> = counts
        .iter()
        .enumerate()
        .map(|(h, c)| format!("class {}: {c} ({:.1}%)", h + 1, 100.0 * *c as f64 / n as f64))
        .collect();
    println!("wrote {} alternatives to {}; {}", n, out.display(), shares.join(", "));
    Ok(())
}

/// Seeded 80/20 train/validation split.
fn holdout(n: usize, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_val = ((0.2 * n as f64).round() as usize).min(n.saturating_sub(1));
    let validation = order.split_off(n - n_val);
    (order, validation)
}

pub fn train_cmd(config: &RunConfig) -> Result<PathBuf> {
    let data = load_data(config)?;
    if data.len() < 2 {
        bail!("need at least 2 alternatives to train, found {}", data.len());
    }
    let (train_idx, val_idx) = holdout(data.len(), config.eval.seed);
    let (train, validation) = (data.subset(&train_idx), data.subset(&val_idx));
    let (model, selection) = fit_model(&train, &validation, &config.model.to_spec(), config.eval.seed)?;
    create_dir(&config.output.dir)?;
    let path = config.output.dir.join(MODEL_FILE);
    save_model(&model, &path).with_context(|| format!("writing {}", path.display()))?;
    let (_, m) = evaluate_model(&model, &validation, config.eval.beta)?;
    println!(
        "trained {} on {} alternatives; validation macro F {:.4}, accuracy {:.4}",
        model.kind_name(),
        train.len(),
        m.macro_f,
        m.accuracy
    );
    println!("selection: {}", serde_json::to_string(&selection)?);
    println!("wrote {}", path.display());
    Ok(path)
}

/// Report of one saved model scored on one dataset.
#[derive(Debug, Serialize)]
pub struct ModelEvaluation {
    pub schema_version: u32,
    pub model_kind: String,
    pub n_samples: usize,
    pub beta: f64,
    pub confusion: ConfusionMatrix,
    pub metrics: MetricsReport,
}

impl ModelEvaluation {
    fn to_text(&self) -> String {
        let mut out = format!(
            "model: {}\nsamples: {}\nmacro F: {:.4}\naccuracy: {:.4}\n",
            self.model_kind, self.n_samples, self.metrics.macro_f, self.metrics.accuracy
        );
        for (h, f) in self.metrics.f_score.iter().enumerate() {
            out += &format!(
                "class {}: precision {:.4}  recall {:.4}  F {:.4}\n",
                h + 1,
                self.metrics.precision[h],
                self.metrics.recall[h],
                f
            );
        }
        out += "confusion (rows: true class, columns: predicted):\n";
        for row in &self.confusion.counts {
            out += &row.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
            out.push('\n');
        }
        out
    }
}

/// Cross-validates the configured model, or scores `model` on the whole
/// dataset when given.
pub fn evaluate_cmd(config: &RunConfig, model: Option<&Path>) -> Result<()> {
    let data = load_data(config)?;
    create_dir(&config.output.dir)?;
    let (json, text) = match model {
        Some(path) => {
            let trained = load_model(path).with_context(|| format!("loading {}", path.display()))?;
            let (confusion, metrics) = evaluate_model(&trained, &data, config.eval.beta)?;
            let report = ModelEvaluation {
                schema_version: EVALUATION_SCHEMA_VERSION,
                model_kind: trained.kind_name().into(),
                n_samples: data.len(),
                beta: config.eval.beta,
                confusion,
                metrics,
            };
            (serde_json::to_string_pretty(&report)?, report.to_text())
        }
        None => {
            let spec = ExperimentSpec {
                jobs: config.eval.jobs,
                beta: config.eval.beta,
                ..ExperimentSpec::new(config.model.to_spec(), config.eval.k, config.eval.seed)
            };
            let (report, _) = run_experiment(&data, &spec)?;
            for fold in &report.folds {
                if let Selection::Tpl { solver_converged: false, kkt_residual, .. } = fold.selection {
                    eprintln!(
                        "warning: fold {} solver stopped at its budget (KKT residual {kkt_residual:.2e})",
                        fold.fold + 1
                    );
                }
            }
            (serde_json::to_string_pretty(&report)?, report.to_text())
        }
    };
    write_text(&config.output.dir.join(REPORT_JSON), &json)?;
    write_text(&config.output.dir.join(REPORT_TEXT), &text)?;
    print!("{text}");
    Ok(())
}

pub fn predict_cmd(model: &Path, data: &Path, out: &Path) -> Result<()> {
    let trained = load_model(model).with_context(|| format!("loading {}", model.display()))?;
    let dataset = load_dataset(data, None).with_context(|| format!("loading {}", data.display()))?;
    let classes = trained.predict_all(dataset.alternatives())?;
    let ids: Vec<&str> = dataset.alternatives().iter().map(|a| a.id.as_str()).collect();
    save_assignments(out, &ids, &classes).with_context(|| format!("writing {}", out.display()))?;
    println!("wrote {} assignments to {}", classes.len(), out.display());
    Ok(())
}

pub fn export_cmd(model: &Path, data: &Path, out: &Path, sample: usize) -> Result<()> {
    let trained = load_model(model).with_context(|| format!("loading {}", model.display()))?;
    let dataset = load_dataset(data, None).with_context(|| format!("loading {}", data.display()))?;
    let take = sample.min(dataset.len());
    let written = export_tables(&trained, &dataset.alternatives()[..take], out)?;
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}
