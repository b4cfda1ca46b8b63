use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `counts[i][j]`: alternatives of true class `i + 1` predicted as `j + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn class_count(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.counts.len()).map(|i| self.counts[i][i]).sum()
    }
}

pub fn confusion(truth: &[usize], pred: &[usize], class_count: usize) -> Result<ConfusionMatrix> {
    if truth.len() != pred.len() {
        return Err(Error::dims(truth.len(), pred.len()));
    }
    let mut counts = vec![vec![0u64; class_count]; class_count];
    for (&t, &p) in truth.iter().zip(pred) {
        for label in [t, p] {
            if label == 0 || label > class_count {
                return Err(Error::LabelOutOfRange { label, classes: class_count });
            }
        }
        counts[t - 1][p - 1] += 1;
    }
    Ok(ConfusionMatrix { counts })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    pub f_score: Vec<f64>,
    pub macro_f: f64,
    pub accuracy: f64,
    pub beta: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Per-class precision, recall and F-beta, their unweighted mean and
/// accuracy. Undefined ratios are reported as 0.
pub fn metrics(cm: &ConfusionMatrix, beta: f64) -> Result<MetricsReport> {
    let h = cm.class_count();
    if h == 0 || cm.total() == 0 {
        return Err(Error::EmptyMatrix);
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
    }
    let b2 = beta * beta;
    let mut precision = Vec::with_capacity(h);
    let mut recall = Vec::with_capacity(h);
    let mut f_score = Vec::with_capacity(h);
    for i in 0..h {
        let row: u64 = cm.counts[i].iter().sum();
        let col: u64 = (0..h).map(|j| cm.counts[j][i]).sum();
        let r = ratio(cm.counts[i][i], row);
        let p = ratio(cm.counts[i][i], col);
        let den = b2 * r + p;
        f_score.push(if den == 0.0 { 0.0 } else { (1.0 + b2) * r * p / den });
        precision.push(p);
        recall.push(r);
    }
    let macro_f = f_score.iter().sum::<f64>() / h as f64;
    let accuracy = ratio(cm.trace(), cm.total());
    Ok(MetricsReport { precision, recall, f_score, macro_f, accuracy, beta })
}
