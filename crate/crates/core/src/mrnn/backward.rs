//! Hand-written backpropagation through time for the mean ordinal loss.

use crate::error::{Error, Result};
use crate::grid::EncodedAlternative;
use crate::numeric::{relu_grad, sigmoid};

use super::forward::{check_input, forward_criterion, CriterionTrace, Effective};
use super::loss::loss_and_grads;
use super::params::{CriterionParams, MrnnConfig, MrnnParams};

/// Adds `scale * dL/dU` back-propagated through one criterion into `grad`.
#[allow(clippy::too_many_arguments)]
fn backward_criterion(
    cp: &CriterionParams,
    eff: &Effective,
    config: &MrnnConfig,
    encoded: &EncodedAlternative,
    j: usize,
    trace: &CriterionTrace,
    g_u_total: f64,
    grad: &mut CriterionParams,
) {
    let (s, g, q, horizon) = (config.hidden_size, config.gamma, config.q_hidden, config.horizon);
    let shift = config.readout_shift();
    let strict = config.monotone_recurrence;
    let mask = |raw: f64| relu_grad(raw);
    let maybe_mask = |raw: f64| if strict { relu_grad(raw) } else { 1.0 };

    // Through the marginal recurrence u^t = f^t + tau^{t-1} u^{t-1}.
    let mut g_f = vec![0.0; horizon];
    let mut g_tau = vec![0.0; horizon.saturating_sub(1)];
    let mut g_u = g_u_total;
    for t in (0..horizon).rev() {
        g_f[t] = g_u;
        if t > 0 {
            g_tau[t - 1] = g_u * trace.marginal[t - 1];
            g_u *= trace.discount[t - 1];
        }
    }

    let mut g_h_next = vec![0.0; s];
    let zero = vec![0.0; s];
    for t in (0..horizon).rev() {
        let h = &trace.hidden[t];
        let mut g_h = std::mem::take(&mut g_h_next);

        let row = t * s;
        for i in 0..s {
            grad.w_f[row + i] += g_f[t] * (h[i] + shift) * mask(cp.w_f[row + i]);
            g_h[i] += g_f[t] * eff.w_f[row + i];
        }

        if t + 1 < horizon {
            let z = &trace.q_hidden[t];
            let tau = trace.discount[t];
            let g_logit = g_tau[t] * tau * (1.0 - tau);
            grad.q_b2 += g_logit;
            for r in 0..q {
                grad.q_w2[r] += g_logit * z[r] * maybe_mask(cp.q_w2[r]);
                let g_pre = g_logit * eff.q_w2[r] * (1.0 - z[r] * z[r]);
                grad.q_b1[r] += g_pre;
                for i in 0..s {
                    grad.q_w1[r * s + i] += g_pre * h[i] * maybe_mask(cp.q_w1[r * s + i]);
                    g_h[i] += g_pre * eff.q_w1[r * s + i];
                }
            }
        }

        let v = encoded.cell(j, t);
        let prev = if t == 0 { &zero } else { &trace.hidden[t - 1] };
        let mut g_prev = vec![0.0; s];
        for i in 0..s {
            let g_a = g_h[i] * (1.0 - h[i] * h[i]);
            if g_a == 0.0 {
                continue;
            }
            grad.b[i] += g_a;
            for k in 0..g {
                grad.w_v[i * g + k] += g_a * v[k] * mask(cp.w_v[i * g + k]);
            }
            for l in 0..s {
                grad.w_h[i * s + l] += g_a * prev[l] * maybe_mask(cp.w_h[i * s + l]);
                g_prev[l] += g_a * eff.w_h[i * s + l];
            }
        }
        g_h_next = g_prev;
    }
}

/// Mean ordinal loss over the batch and its exact gradient with respect to
/// every raw parameter (masks contribute a zero subgradient at zero).
pub fn gradients(
    params: &MrnnParams,
    config: &MrnnConfig,
    batch: &[EncodedAlternative],
    labels: &[usize],
) -> Result<(f64, MrnnParams)> {
    if batch.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if batch.len() != labels.len() {
        return Err(Error::dims(batch.len(), labels.len()));
    }
    params.check_shape(config)?;
    let h = config.class_count;
    if let Some(&y) = labels.iter().find(|&&y| y == 0 || y > h) {
        return Err(Error::LabelOutOfRange { label: y, classes: h });
    }
    let classes = params.class_structure()?;
    let effective: Vec<Effective> = params.criteria.iter().map(|cp| Effective::new(cp, config)).collect();
    let scale = 1.0 / batch.len() as f64;
    let mut grad = MrnnParams::zeros(config);
    let mut g_theta = vec![0.0; h - 1];
    let mut total = 0.0;

    for (enc, &y) in batch.iter().zip(labels) {
        check_input(config, enc)?;
        let traces: Vec<CriterionTrace> = params
            .criteria
            .iter()
            .zip(&effective)
            .enumerate()
            .map(|(j, (cp, eff))| forward_criterion(cp, eff, config, enc, j))
            .collect();
        let u: f64 = traces.iter().map(|c| c.marginal[config.horizon - 1]).sum();
        let (loss, g_u, g_t) = loss_and_grads(u, y, &classes);
        total += loss;
        for (acc, g) in g_theta.iter_mut().zip(&g_t) {
            *acc += scale * g;
        }
        if g_u != 0.0 {
            for (j, trace) in traces.iter().enumerate() {
                backward_criterion(
                    &params.criteria[j],
                    &effective[j],
                    config,
                    enc,
                    j,
                    trace,
                    scale * g_u,
                    &mut grad.criteria[j],
                );
            }
        }
    }

    // theta_1 = base, theta_{h+1} = theta_h + softplus(r_h) + gap.
    grad.threshold_base = g_theta.iter().sum();
    for (k, r) in params.threshold_increments.iter().enumerate() {
        grad.threshold_increments[k] = sigmoid(*r) * g_theta[k + 1..].iter().sum::<f64>();
    }
    Ok((total * scale, grad))
}
