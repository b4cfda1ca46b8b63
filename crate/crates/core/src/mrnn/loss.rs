//! Cumulative-link class probabilities with a logistic link.

use crate::classes::ClassStructure;
use crate::error::{Error, Result};
use crate::numeric::sigmoid;

/// Probabilities below this are clamped before taking the logarithm.
pub const PROB_FLOOR: f64 = 1e-12;

/// `sigmoid(theta_h - U)` for `h = 0..=H`, exactly 0 and 1 at the sentinels.
fn cumulative(u: f64, classes: &ClassStructure) -> Vec<f64> {
    let h = classes.class_count();
    (0..=h)
        .map(|k| match k {
            0 => 0.0,
            k if k == h => 1.0,
            k => sigmoid(classes.bound(k) - u),
        })
        .collect()
}

/// `p_h = sigmoid(theta_h - U) - sigmoid(theta_{h-1} - U)` for `h = 1..=H`.
pub fn class_probabilities(u: f64, classes: &ClassStructure) -> Vec<f64> {
    cumulative(u, classes).windows(2).map(|w| w[1] - w[0]).collect()
}

/// Per-sample `-log p_{label}` and their mean.
pub fn ordinal_loss(values: &[f64], labels: &[usize], classes: &ClassStructure) -> Result<(Vec<f64>, f64)> {
    if values.len() != labels.len() {
        return Err(Error::dims(values.len(), labels.len()));
    }
    if values.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let h = classes.class_count();
    let losses: Vec<f64> = values
        .iter()
        .zip(labels)
        .map(|(&u, &y)| {
            if y == 0 || y > h {
                return Err(Error::LabelOutOfRange { label: y, classes: h });
            }
            Ok(-class_probabilities(u, classes)[y - 1].max(PROB_FLOOR).ln())
        })
        .collect::<Result<_>>()?;
    let mean = losses.iter().sum::<f64>() / losses.len() as f64;
    Ok((losses, mean))
}

/// Loss of one sample and its derivatives with respect to `U` and to each
/// interior threshold.
pub(crate) fn loss_and_grads(u: f64, label: usize, classes: &ClassStructure) -> (f64, f64, Vec<f64>) {
    let h = classes.class_count();
    let c = cumulative(u, classes);
    let p = c[label] - c[label - 1];
    let mut g_theta = vec![0.0; h - 1];
    if p < PROB_FLOOR {
        return (-PROB_FLOOR.ln(), 0.0, g_theta);
    }
    let dl_dp = -1.0 / p;
    let slope = |k: usize| if k == 0 || k == h { 0.0 } else { c[k] * (1.0 - c[k]) };
    let (upper, lower) = (slope(label), slope(label - 1));
    let g_u = dl_dp * (lower - upper);
    if label < h {
        g_theta[label - 1] += dl_dp * upper;
    }
    if label > 1 {
        g_theta[label - 2] -= dl_dp * lower;
    }
    (-p.ln(), g_u, g_theta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probabilities_sum_to_one() {
        let cs = ClassStructure::new(vec![-1.0, 0.3, 2.0]).unwrap();
        for u in [-1e3, -2.0, 0.0, 0.3, 1.7, 40.0] {
            let p = class_probabilities(u, &cs);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(p.iter().all(|x| *x >= 0.0));
        }
        let two = ClassStructure::new(vec![0.0]).unwrap();
        let p = class_probabilities(0.8, &two);
        assert_eq!(p, vec![sigmoid(-0.8), 1.0 - sigmoid(-0.8)]);
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        let cs = ClassStructure::new(vec![-0.5, 1.0, 2.5]).unwrap();
        let h = 1e-6;
        for label in 1..=4 {
            for u in [-1.0, 0.2, 1.7, 3.0] {
                let (_, gu, gt) = loss_and_grads(u, label, &cs);
                let l = |u: f64, cs: &ClassStructure| loss_and_grads(u, label, cs).0;
                let fd = (l(u + h, &cs) - l(u - h, &cs)) / (2.0 * h);
                assert!((gu - fd).abs() < 1e-6, "label {label} u {u}: {gu} vs {fd}");
                for k in 0..3 {
                    let mut up = cs.thresholds().to_vec();
                    let mut dn = up.clone();
                    up[k] += h;
                    dn[k] -= h;
                    let fd = (l(u, &ClassStructure::new(up).unwrap()) - l(u, &ClassStructure::new(dn).unwrap()))
                        / (2.0 * h);
                    assert!((gt[k] - fd).abs() < 1e-6);
                }
            }
        }
    }
}
