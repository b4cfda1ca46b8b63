//! The TOML run configuration. Every key is optional; unknown keys are errors.

use std::path::PathBuf;

use serde::Deserialize;

use tempsort::dgp::{DgpConfig, DgpKind};
use tempsort::eval::{ModelSpec, TplSpec};
use tempsort::mrnn::MrnnConfig;
use tempsort::tpl::SolverKind;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Read alternatives from a file. Mutually exclusive with `dgp`.
    pub dataset: Option<DatasetSection>,
    /// Generate alternatives. Used (with defaults) when `dataset` is absent.
    pub dgp: Option<DgpSection>,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub eval: EvalSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSection {
    pub path: PathBuf,
    /// Number of classes; inferred from the largest label when absent.
    pub class_count: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DgpSection {
    pub kind: DgpKind,
    pub n: usize,
    pub seed: u64,
    pub criteria: usize,
    pub horizon: usize,
}

impl Default for DgpSection {
    fn default() -> Self {
        Self { kind: DgpKind::Basic, n: 1000, seed: 0, criteria: 4, horizon: 20 }
    }
}

impl DgpSection {
    pub fn to_config(&self) -> DgpConfig {
        DgpConfig { kind: self.kind, n_samples: self.n, criteria: self.criteria, horizon: self.horizon, seed: self.seed }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelFamily {
    Tpl,
    Mrnn,
}

/// Keys for both families; those of the other family are ignored.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub kind: ModelFamily,
    pub gamma: usize,
    // TPL
    /// Fixes the discount; overrides `taus`.
    pub tau: Option<f64>,
    pub taus: Vec<f64>,
    /// Fixes the regularization weight; overrides `cs`.
    pub c: Option<f64>,
    pub cs: Vec<f64>,
    pub solver: SolverKind,
    pub tol: f64,
    pub max_iter: usize,
    /// Largest number of preference pairs; 0 keeps every pair.
    pub pair_cap: usize,
    // mRNN
    pub hidden_size: usize,
    pub q_hidden: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub validation_patience: usize,
    pub momentum: f64,
    pub grad_clip: f64,
    pub monotone_recurrence: bool,
}

impl Default for ModelSection {
    fn default() -> Self {
        let tpl = TplSpec::default();
        let mrnn = MrnnConfig::default();
        Self {
            kind: ModelFamily::Tpl,
            gamma: tpl.gamma,
            tau: None,
            taus: tpl.taus,
            c: None,
            cs: tpl.cs,
            solver: tpl.solver,
            tol: tpl.tol,
            max_iter: tpl.max_iter,
            pair_cap: tpl.pair_cap.unwrap_or(0),
            hidden_size: mrnn.hidden_size,
            q_hidden: mrnn.q_hidden,
            epochs: mrnn.epochs,
            learning_rate: mrnn.learning_rate,
            batch_size: mrnn.batch_size,
            validation_patience: mrnn.validation_patience,
            momentum: mrnn.momentum,
            grad_clip: mrnn.grad_clip,
            monotone_recurrence: mrnn.monotone_recurrence,
        }
    }
}

impl ModelSection {
    pub fn to_spec(&self) -> ModelSpec {
        match self.kind {
            ModelFamily::Tpl => ModelSpec::Tpl(TplSpec {
                gamma: self.gamma,
                taus: self.tau.map_or_else(|| self.taus.clone(), |t| vec![t]),
                cs: self.c.map_or_else(|| self.cs.clone(), |c| vec![c]),
                solver: self.solver,
                tol: self.tol,
                max_iter: self.max_iter,
                pair_cap: (self.pair_cap > 0).then_some(self.pair_cap),
            }),
            ModelFamily::Mrnn => ModelSpec::Mrnn(MrnnConfig {
                gamma: self.gamma,
                hidden_size: self.hidden_size,
                q_hidden: self.q_hidden,
                epochs: self.epochs,
                learning_rate: self.learning_rate,
                batch_size: self.batch_size,
                validation_patience: self.validation_patience,
                momentum: self.momentum,
                grad_clip: self.grad_clip,
                monotone_recurrence: self.monotone_recurrence,
                ..MrnnConfig::default()
            }),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalSection {
    pub k: usize,
    pub seed: u64,
    pub beta: f64,
    pub jobs: usize,
}

impl Default for EvalSection {
    fn default() -> Self {
        Self { k: 5, seed: 0, beta: 1.0, jobs: 1 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_takes_defaults() {
        let c: RunConfig = toml::from_str("").unwrap();
        assert!(c.dataset.is_none() && c.dgp.is_none());
        assert_eq!(c.eval.k, 5);
        assert_eq!(c.model.kind, ModelFamily::Tpl);
        assert_eq!(c.model.to_spec(), ModelSpec::Tpl(TplSpec::default()));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<RunConfig>("[model]\nkind = \"tpl\"\nbogus = 1\n").is_err());
        assert!(toml::from_str::<RunConfig>("[extra]\n").is_err());
        assert!(toml::from_str::<RunConfig>("[model]\nkind = \"svm\"\n").is_err());
    }

    #[test]
    fn fixed_tau_and_mrnn_keys() {
        let c: RunConfig = toml::from_str("[model]\ntau = 0.8\nc = 10.0\n").unwrap();
        match c.model.to_spec() {
            ModelSpec::Tpl(s) => assert_eq!((s.taus, s.cs), (vec![0.8], vec![10.0])),
            other => panic!("{other:?}"),
        }
        let c: RunConfig =
            toml::from_str("[model]\nkind = \"mrnn\"\ngamma = 6\nepochs = 7\n[dgp]\nkind = \"non-monotonic\"\n").unwrap();
        match c.model.to_spec() {
            ModelSpec::Mrnn(m) => assert_eq!((m.gamma, m.epochs), (6, 7)),
            other => panic!("{other:?}"),
        }
        assert_eq!(c.dgp.unwrap().kind, DgpKind::NonMonotonic);
    }
}
