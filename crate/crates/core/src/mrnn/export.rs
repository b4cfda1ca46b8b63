use crate::error::Result;
use crate::grid::{EncodedAlternative, Grid, Shape};
use crate::model::{DiscountRow, MarginalRow};

use super::forward::forward;
use super::params::{MrnnConfig, MrnnParams};

/// Learned sub-marginal curves and per-sample discount traces.
///
/// Each curve point feeds a probe that equals the sample's mean encoding
/// everywhere except cell `(j, t)`, which is set to characteristic point `k`;
/// the reported value is `f_j^t` of that probe. An empty sample probes
/// around the all-worst alternative.
pub fn export_marginals(
    params: &MrnnParams,
    config: &MrnnConfig,
    grid: &Grid,
    sample: &[EncodedAlternative],
) -> Result<(Vec<MarginalRow>, Vec<DiscountRow>)> {
    let shape = Shape::new(config.criteria, config.horizon, config.gamma);
    let mut mean = vec![0.0; shape.len()];
    for e in sample {
        for (m, v) in mean.iter_mut().zip(e.values()) {
            *m += v;
        }
    }
    if !sample.is_empty() {
        mean.iter_mut().for_each(|m| *m /= sample.len() as f64);
    }
    let base = EncodedAlternative::from_parts("probe".into(), None, shape, mean)?;

    let mut rows = Vec::with_capacity(shape.cells() * (shape.gamma + 1));
    for j in 0..shape.criteria {
        for t in 0..shape.horizon {
            for (k, g) in grid.points(j, t).iter().enumerate() {
                let mut probe = base.clone();
                probe.cell_mut(j, t).copy_from_slice(&grid.point_encoding(k));
                let trace = forward(params, config, &probe)?;
                rows.push(MarginalRow {
                    criterion: j + 1,
                    timestamp: t + 1,
                    point_index: k,
                    g_value: *g,
                    sub_marginal: trace.sub_marginal[t][j],
                });
            }
        }
    }

    let mut discounts = Vec::with_capacity(sample.len() * shape.criteria * shape.horizon.saturating_sub(1));
    for e in sample {
        let trace = forward(params, config, e)?;
        for j in 0..shape.criteria {
            for (t, row) in trace.discount.iter().enumerate() {
                discounts.push(DiscountRow { sample_id: e.id.clone(), criterion: j + 1, timestamp: t + 1, tau: row[j] });
            }
        }
    }
    Ok((rows, discounts))
}
