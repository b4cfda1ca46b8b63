use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{EncodedAlternative, Shape};
use crate::numeric::{relu, sigmoid};

use super::params::{CriterionParams, MrnnConfig, MrnnParams};

/// Every intermediate value of one forward pass. Arrays are indexed
/// `[t][j]`, hidden states `[t][j][i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForwardTrace {
    pub hidden: Vec<Vec<Vec<f64>>>,
    pub sub_marginal: Vec<Vec<f64>>,
    /// `discount[t][j]` scales `u^t` on its way into `u^{t+1}`; `T - 1` rows.
    pub discount: Vec<Vec<f64>>,
    pub marginal: Vec<Vec<f64>>,
    pub comprehensive: f64,
}

/// Per-criterion trace, including the discount network's hidden layer.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct CriterionTrace {
    pub hidden: Vec<Vec<f64>>,
    pub q_hidden: Vec<Vec<f64>>,
    pub sub_marginal: Vec<f64>,
    pub discount: Vec<f64>,
    pub marginal: Vec<f64>,
}

/// Masked views of one criterion's weights.
pub(crate) struct Effective {
    pub w_v: Vec<f64>,
    pub w_h: Vec<f64>,
    pub w_f: Vec<f64>,
    pub q_w1: Vec<f64>,
    pub q_w2: Vec<f64>,
}

impl Effective {
    pub fn new(cp: &CriterionParams, config: &MrnnConfig) -> Self {
        let mask = |v: &[f64]| v.iter().map(|x| relu(*x)).collect::<Vec<_>>();
        let strict = config.monotone_recurrence;
        let maybe = |v: &[f64]| if strict { mask(v) } else { v.to_vec() };
        Self {
            w_v: mask(&cp.w_v),
            w_h: maybe(&cp.w_h),
            w_f: mask(&cp.w_f),
            q_w1: maybe(&cp.q_w1),
            q_w2: maybe(&cp.q_w2),
        }
    }
}

pub(crate) fn check_input(config: &MrnnConfig, encoded: &EncodedAlternative) -> Result<()> {
    let expected = Shape::new(config.criteria, config.horizon, config.gamma);
    if encoded.shape() != expected {
        return Err(Error::dims(format!("{expected:?}"), format!("{:?}", encoded.shape())));
    }
    Ok(())
}

pub(crate) fn forward_criterion(
    cp: &CriterionParams,
    eff: &Effective,
    config: &MrnnConfig,
    encoded: &EncodedAlternative,
    j: usize,
) -> CriterionTrace {
    let (s, g, q, horizon) = (config.hidden_size, config.gamma, config.q_hidden, config.horizon);
    let shift = config.readout_shift();
    let mut hidden: Vec<Vec<f64>> = Vec::with_capacity(horizon);
    let mut q_hidden = Vec::with_capacity(horizon.saturating_sub(1));
    let mut sub_marginal = Vec::with_capacity(horizon);
    let mut discount = Vec::with_capacity(horizon.saturating_sub(1));
    let mut marginal: Vec<f64> = Vec::with_capacity(horizon);
    let zero = vec![0.0; s];
    for t in 0..horizon {
        let v = encoded.cell(j, t);
        let prev = if t == 0 { &zero } else { &hidden[t - 1] };
        let h: Vec<f64> = (0..s)
            .map(|i| {
                let input: f64 = (0..g).map(|k| eff.w_v[i * g + k] * v[k]).sum();
                let rec: f64 = (0..s).map(|l| eff.w_h[i * s + l] * prev[l]).sum();
                (input + rec + cp.b[i]).tanh()
            })
            .collect();
        let wf = &eff.w_f[t * s..(t + 1) * s];
        let f: f64 = wf.iter().zip(&h).map(|(w, hi)| w * (hi + shift)).sum();
        let u = match t {
            0 => f,
            _ => f + discount[t - 1] * marginal[t - 1],
        };
        if t + 1 < horizon {
            let z: Vec<f64> = (0..q)
                .map(|r| {
                    let pre: f64 = (0..s).map(|i| eff.q_w1[r * s + i] * h[i]).sum();
                    (pre + cp.q_b1[r]).tanh()
                })
                .collect();
            let logit: f64 = eff.q_w2.iter().zip(&z).map(|(w, zr)| w * zr).sum::<f64>() + cp.q_b2;
            discount.push(sigmoid(logit));
            q_hidden.push(z);
        }
        sub_marginal.push(f);
        marginal.push(u);
        hidden.push(h);
    }
    CriterionTrace { hidden, q_hidden, sub_marginal, discount, marginal }
}

pub(crate) fn forward_criteria(
    params: &MrnnParams,
    config: &MrnnConfig,
    encoded: &EncodedAlternative,
) -> Result<Vec<CriterionTrace>> {
    check_input(config, encoded)?;
    params.check_shape(config)?;
    Ok(params
        .criteria
        .iter()
        .enumerate()
        .map(|(j, cp)| forward_criterion(cp, &Effective::new(cp, config), config, encoded, j))
        .collect())
}

/// `U(a) = sum_j u_j^T` together with every intermediate quantity.
pub fn forward(params: &MrnnParams, config: &MrnnConfig, encoded: &EncodedAlternative) -> Result<ForwardTrace> {
    let traces = forward_criteria(params, config, encoded)?;
    let horizon = config.horizon;
    let by_time = |pick: &dyn Fn(&CriterionTrace, usize) -> f64, len: usize| -> Vec<Vec<f64>> {
        (0..len).map(|t| traces.iter().map(|c| pick(c, t)).collect()).collect()
    };
    Ok(ForwardTrace {
        hidden: (0..horizon).map(|t| traces.iter().map(|c| c.hidden[t].clone()).collect()).collect(),
        sub_marginal: by_time(&|c, t| c.sub_marginal[t], horizon),
        discount: by_time(&|c, t| c.discount[t], horizon.saturating_sub(1)),
        marginal: by_time(&|c, t| c.marginal[t], horizon),
        comprehensive: traces.iter().map(|c| c.marginal[horizon - 1]).sum(),
    })
}

/// Just `U(a)`, without materializing the full trace.
pub fn comprehensive_value(params: &MrnnParams, config: &MrnnConfig, encoded: &EncodedAlternative) -> Result<f64> {
    Ok(forward_criteria(params, config, encoded)?.iter().map(|c| c.marginal[config.horizon - 1]).sum())
}

/// One step of the marginal-value recurrence.
#[inline]
pub fn recurrence_step(f: f64, tau: f64, u_prev: f64) -> f64 {
    f + tau * u_prev
}
