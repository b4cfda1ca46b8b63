use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::grid::{build_grid, encode_all, EncodedAlternative};
use crate::model::{ModelKind, TrainedModel};
use crate::mrnn::{self, MrnnConfig};
use crate::numeric::mean_std;
use crate::tpl::{SolverKind, SolverOptions, TplModel, TplOptions, DEFAULT_PAIR_CAP};

use super::metrics::{confusion, metrics, ConfusionMatrix, MetricsReport};
use super::split::{kfold_split, Fold, SplitRatios};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TplSpec {
    pub gamma: usize,
    /// Candidate discounts; the validation split picks one.
    pub taus: Vec<f64>,
    /// Candidate regularization weights.
    pub cs: Vec<f64>,
    pub solver: SolverKind,
    pub tol: f64,
    pub max_iter: usize,
    pub pair_cap: Option<usize>,
}

impl Default for TplSpec {
    fn default() -> Self {
        Self {
            gamma: 4,
            taus: vec![0.5, 0.8, 1.0],
            cs: vec![0.1, 1.0],
            solver: SolverKind::Dual,
            tol: 1e-6,
            max_iter: 300,
            pair_cap: Some(DEFAULT_PAIR_CAP),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelSpec {
    Tpl(TplSpec),
    /// Shape fields (criteria, horizon, class count) are taken from the data
    /// and the seed from the run; everything else is used as given.
    Mrnn(MrnnConfig),
}

impl ModelSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ModelSpec::Tpl(_) => "tpl",
            ModelSpec::Mrnn(_) => "mrnn",
        }
    }

    pub fn gamma(&self) -> usize {
        match self {
            ModelSpec::Tpl(s) => s.gamma,
            ModelSpec::Mrnn(c) => c.gamma,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub model: ModelSpec,
    pub k: usize,
    pub ratios: SplitRatios,
    pub seed: u64,
    pub beta: f64,
    /// Worker threads for folds; results are joined in fold order.
    pub jobs: usize,
}

impl ExperimentSpec {
    pub fn new(model: ModelSpec, k: usize, seed: u64) -> Self {
        Self { model, k, ratios: SplitRatios::default(), seed, beta: 1.0, jobs: 1 }
    }
}

/// What model selection settled on for one fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Selection {
    Tpl {
        tau: f64,
        c: f64,
        validation_macro_f: f64,
        solver_converged: bool,
        kkt_residual: f64,
        fallback_boundaries: Vec<usize>,
    },
    Mrnn {
        best_epoch: usize,
        epochs_run: usize,
        validation_loss: f64,
        thresholds: Vec<f64>,
    },
}

fn labels(set: &[EncodedAlternative]) -> Result<Vec<usize>> {
    set.iter()
        .map(|e| e.label.ok_or_else(|| Error::InvalidArgument(format!("alternative `{}` has no label", e.id))))
        .collect()
}

pub fn evaluate_encoded(
    model: &TrainedModel,
    set: &[EncodedAlternative],
    class_count: usize,
    beta: f64,
) -> Result<(ConfusionMatrix, MetricsReport)> {
    let pred: Vec<usize> = set.iter().map(|e| model.assign_encoded(e)).collect::<Result<_>>()?;
    let cm = confusion(&labels(set)?, &pred, class_count)?;
    let m = metrics(&cm, beta)?;
    Ok((cm, m))
}

/// Evaluates a model on every labelled alternative of `dataset`.
pub fn evaluate_model(model: &TrainedModel, dataset: &Dataset, beta: f64) -> Result<(ConfusionMatrix, MetricsReport)> {
    let encoded = encode_all(dataset, &model.grid)?;
    evaluate_encoded(model, &encoded, dataset.class_count(), beta)
}

/// Fits on `train`, using `validation` for hyperparameter choice (TPL) or
/// early stopping (mRNN). The grid is built from `train` alone.
pub fn fit_model(train: &Dataset, validation: &Dataset, spec: &ModelSpec, seed: u64) -> Result<(TrainedModel, Selection)> {
    let grid = build_grid(train, spec.gamma())?;
    let enc_train = encode_all(train, &grid)?;
    let enc_val = encode_all(validation, &grid)?;
    let h = train.class_count();
    match spec {
        ModelSpec::Tpl(s) => {
            if s.taus.is_empty() || s.cs.is_empty() {
                return Err(Error::InvalidArgument("empty tau or C grid".into()));
            }
            let mut best: Option<(f64, TrainedModel, Selection)> = None;
            for &tau in &s.taus {
                for &c in &s.cs {
                    let opts = TplOptions {
                        tau,
                        solver: s.solver,
                        solver_options: SolverOptions { c, tol: s.tol, max_iter: s.max_iter },
                        pair_cap: s.pair_cap,
                        seed,
                    };
                    let (model, report) = TplModel::fit(&enc_train, h, &opts)?;
                    let candidate = TrainedModel { grid: grid.clone(), kind: ModelKind::Tpl(model) };
                    let score = if enc_val.is_empty() {
                        0.0
                    } else {
                        evaluate_encoded(&candidate, &enc_val, h, 1.0)?.1.macro_f
                    };
                    if best.as_ref().map_or(true, |b| score > b.0) {
                        let selection = Selection::Tpl {
                            tau,
                            c,
                            validation_macro_f: score,
                            solver_converged: report.solver.converged,
                            kkt_residual: report.solver.kkt_residual,
                            fallback_boundaries: report.fallback_boundaries,
                        };
                        best = Some((score, candidate, selection));
                    }
                }
            }
            let (_, model, selection) = best.expect("grids are non-empty");
            Ok((model, selection))
        }
        ModelSpec::Mrnn(template) => {
            let config = MrnnConfig {
                criteria: train.criteria(),
                horizon: train.horizon(),
                class_count: h,
                seed,
                ..template.clone()
            };
            let (params, report) = mrnn::train(&enc_train, &enc_val, &config)?;
            let validation_loss = match report.best_epoch {
                0 => f64::NAN,
                e => report.validation_loss[e - 1],
            };
            let selection = Selection::Mrnn {
                best_epoch: report.best_epoch,
                epochs_run: report.epochs_run,
                validation_loss,
                thresholds: report.thresholds,
            };
            Ok((TrainedModel { grid, kind: ModelKind::Mrnn { config, params } }, selection))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub train_size: usize,
    pub validation_size: usize,
    pub test_size: usize,
    pub confusion: ConfusionMatrix,
    pub metrics: MetricsReport,
    pub selection: Selection,
    pub runtime_secs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let (mean, std) = mean_std(values);
        Self { mean, std }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub model_kind: String,
    pub k: usize,
    pub seed: u64,
    pub beta: f64,
    pub n_samples: usize,
    pub macro_f: Summary,
    pub accuracy: Summary,
    pub per_class_f: Vec<Summary>,
    pub folds: Vec<FoldReport>,
    pub total_runtime_secs: f64,
}

impl ExperimentReport {
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "model: {}\nsamples: {}  folds: {}  seed: {}\nmacro F: {:.4} +- {:.4}\naccuracy: {:.4} +- {:.4}\n",
            self.model_kind,
            self.n_samples,
            self.k,
            self.seed,
            self.macro_f.mean,
            self.macro_f.std,
            self.accuracy.mean,
            self.accuracy.std
        );
        for (h, s) in self.per_class_f.iter().enumerate() {
            out += &format!("class {} F: {:.4} +- {:.4}\n", h + 1, s.mean, s.std);
        }
        for f in &self.folds {
            out += &format!(
                "fold {}: macro F {:.4}  accuracy {:.4}  ({:.1}s)\n",
                f.fold + 1,
                f.metrics.macro_f,
                f.metrics.accuracy,
                f.runtime_secs
            );
        }
        out
    }
}

fn run_fold(dataset: &Dataset, fold: &Fold, index: usize, spec: &ExperimentSpec) -> Result<(FoldReport, TrainedModel)> {
    let start = Instant::now();
    let train = dataset.subset(&fold.train);
    let validation = dataset.subset(&fold.validation);
    let test = dataset.subset(&fold.test);
    let seed = spec.seed.wrapping_add(index as u64);
    let (model, selection) = fit_model(&train, &validation, &spec.model, seed)?;
    let (cm, m) = evaluate_model(&model, &test, spec.beta)?;
    let report = FoldReport {
        fold: index,
        train_size: fold.train.len(),
        validation_size: fold.validation.len(),
        test_size: fold.test.len(),
        confusion: cm,
        metrics: m,
        selection,
        runtime_secs: start.elapsed().as_secs_f64(),
    };
    Ok((report, model))
}

/// k-fold train / select / test loop. Returns the aggregate report and the
/// model fitted in each fold.
pub fn run_experiment(dataset: &Dataset, spec: &ExperimentSpec) -> Result<(ExperimentReport, Vec<TrainedModel>)> {
    let start = Instant::now();
    let split = kfold_split(dataset.len(), spec.k, spec.ratios, spec.seed)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let results: Vec<Result<(FoldReport, TrainedModel)>> = pool.install(|| {
        split
            .folds
            .par_iter()
            .enumerate()
            .map(|(i, fold)| run_fold(dataset, fold, i, spec))
            .collect()
    });
    let (folds, models): (Vec<_>, Vec<_>) = results.into_iter().collect::<Result<Vec<_>>>()?.into_iter().unzip();

    let pick = |f: &dyn Fn(&FoldReport) -> f64| Summary::of(&folds.iter().map(f).collect::<Vec<_>>());
    let per_class_f = (0..dataset.class_count()).map(|h| pick(&|r| r.metrics.f_score[h])).collect();
    let report = ExperimentReport {
        schema_version: REPORT_SCHEMA_VERSION,
        model_kind: spec.model.kind_name().into(),
        k: spec.k,
        seed: spec.seed,
        beta: spec.beta,
        n_samples: dataset.len(),
        macro_f: pick(&|r| r.metrics.macro_f),
        accuracy: pick(&|r| r.metrics.accuracy),
        per_class_f,
        folds,
        total_runtime_secs: start.elapsed().as_secs_f64(),
    };
    Ok((report, models))
}
