use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::EncodedAlternative;

use super::backward::gradients;
use super::forward::comprehensive_value;
use super::loss::ordinal_loss;
use super::params::{MrnnConfig, MrnnParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub train_loss: Vec<f64>,
    pub validation_loss: Vec<f64>,
    /// 1-based epoch whose parameters were kept (0 means the initial ones).
    pub best_epoch: usize,
    pub epochs_run: usize,
    pub stopped_early: bool,
    pub thresholds: Vec<f64>,
}

fn labels_of(set: &[EncodedAlternative]) -> Result<Vec<usize>> {
    set.iter()
        .map(|e| e.label.ok_or_else(|| Error::InvalidArgument(format!("alternative `{}` has no label", e.id))))
        .collect()
}

/// Mean ordinal loss of `params` on a labelled set.
pub fn mean_loss(params: &MrnnParams, config: &MrnnConfig, set: &[EncodedAlternative]) -> Result<f64> {
    let values: Vec<f64> =
        set.iter().map(|e| comprehensive_value(params, config, e)).collect::<Result<_>>()?;
    Ok(ordinal_loss(&values, &labels_of(set)?, &params.class_structure()?)?.1)
}

/// Places `theta_1` at the mean initial value so both sides of the first
/// boundary receive gradient from the first batch on.
fn center_thresholds(params: &mut MrnnParams, config: &MrnnConfig, train: &[EncodedAlternative]) -> Result<()> {
    let sum: f64 = train.iter().map(|e| comprehensive_value(params, config, e)).sum::<Result<f64>>()?;
    let spread = (config.class_count - 2) as f64 / 2.0;
    params.threshold_base = sum / train.len() as f64 - spread;
    Ok(())
}

/// Mini-batch gradient descent with momentum and global-norm clipping.
/// Keeps the parameters with the lowest validation loss (training loss when
/// `validation` is empty) and stops after `validation_patience` epochs
/// without improvement.
pub fn train(
    train: &[EncodedAlternative],
    validation: &[EncodedAlternative],
    config: &MrnnConfig,
) -> Result<(MrnnParams, TrainReport)> {
    config.validate()?;
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let train_labels = labels_of(train)?;
    let mut params = MrnnParams::init(config)?;
    center_thresholds(&mut params, config, train)?;
    let mut velocity = MrnnParams::zeros(config).to_flat();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut order: Vec<usize> = (0..train.len()).collect();

    let monitor = |p: &MrnnParams| -> Result<f64> {
        if validation.is_empty() {
            mean_loss(p, config, train)
        } else {
            mean_loss(p, config, validation)
        }
    };
    let mut best = (monitor(&params)?, params.clone(), 0);
    let mut report = TrainReport {
        train_loss: Vec::new(),
        validation_loss: Vec::new(),
        best_epoch: 0,
        epochs_run: 0,
        stopped_early: false,
        thresholds: Vec::new(),
    };
    let mut batch = Vec::with_capacity(config.batch_size);
    let mut batch_labels = Vec::with_capacity(config.batch_size);

    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(config.batch_size) {
            batch.clear();
            batch_labels.clear();
            for &i in chunk {
                batch.push(train[i].clone());
                batch_labels.push(train_labels[i]);
            }
            let (loss, grad) = gradients(&params, config, &batch, &batch_labels)?;
            if !loss.is_finite() {
                return Err(Error::Diverged { epoch });
            }
            let mut g = grad.to_flat();
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > config.grad_clip {
                let k = config.grad_clip / norm;
                g.iter_mut().for_each(|x| *x *= k);
            }
            let mut flat = params.to_flat();
            for ((p, v), gk) in flat.iter_mut().zip(&mut velocity).zip(&g) {
                *v = config.momentum * *v - config.learning_rate * gk;
                *p += *v;
            }
            params.set_flat(&flat)?;
        }

        let train_loss = mean_loss(&params, config, train)?;
        let watched = if validation.is_empty() { train_loss } else { monitor(&params)? };
        if !train_loss.is_finite() || !watched.is_finite() {
            return Err(Error::Diverged { epoch });
        }
        report.train_loss.push(train_loss);
        report.validation_loss.push(watched);
        report.epochs_run = epoch;
        if watched < best.0 {
            best = (watched, params.clone(), epoch);
        } else if epoch - best.2 >= config.validation_patience {
            report.stopped_early = true;
            break;
        }
    }

    let (_, params, best_epoch) = best;
    report.best_epoch = best_epoch;
    report.thresholds = params.thresholds();
    Ok((params, report))
}
