//! Shared objective and optimality measures for the two solvers.

use crate::numeric::dot;

use super::PairwiseSample;

/// `y_i u . v_i` for every pair.
pub(crate) fn margins(pairs: &[PairwiseSample], u: &[f64]) -> Vec<f64> {
    pairs.iter().map(|p| p.y * dot(&p.v_diff, u)).collect()
}

/// `w(mu) = sum_i y_i mu_i v_i`.
pub(crate) fn weighted_sum(pairs: &[PairwiseSample], mu: &[f64], dim: usize) -> Vec<f64> {
    let mut w = vec![0.0; dim];
    for (p, &m) in pairs.iter().zip(mu) {
        if m != 0.0 {
            let s = p.y * m;
            for (wk, vk) in w.iter_mut().zip(&p.v_diff) {
                *wk += s * vk;
            }
        }
    }
    w
}

pub(crate) fn project_nonneg(w: &[f64]) -> Vec<f64> {
    w.iter().map(|&x| x.max(0.0)).collect()
}

/// `1/2 ||u||^2 + C sum_i max(0, 1 - y_i u . v_i)`.
pub fn primal_objective(pairs: &[PairwiseSample], c: f64, u: &[f64]) -> f64 {
    let hinge: f64 = margins(pairs, u).iter().map(|m| (1.0 - m).max(0.0)).sum();
    0.5 * dot(u, u) + c * hinge
}

/// `sum_i mu_i - 1/2 ||P+(w(mu))||^2`, a lower bound on the primal optimum.
pub fn dual_objective(pairs: &[PairwiseSample], mu: &[f64], dim: usize) -> f64 {
    let u = project_nonneg(&weighted_sum(pairs, mu, dim));
    mu.iter().sum::<f64>() - 0.5 * dot(&u, &u)
}

/// Largest violation of the optimality conditions of the pair `(u, mu)`:
/// stationarity `u = P+(w(mu))` and the projected dual gradient on `[0, C]`.
pub fn kkt_residual(pairs: &[PairwiseSample], c: f64, u: &[f64], mu: &[f64]) -> f64 {
    let w = weighted_sum(pairs, mu, u.len());
    let stationarity = u.iter().zip(&w).map(|(uk, wk)| (uk - wk.max(0.0)).abs()).fold(0.0, f64::max);
    let complementarity = margins(pairs, u)
        .iter()
        .zip(mu)
        .map(|(m, &mi)| projected_gradient(m - 1.0, mi, c).abs())
        .fold(0.0, f64::max);
    stationarity.max(complementarity)
}

/// Projection of a dual gradient component onto the tangent cone of `[0, C]`.
#[inline]
pub(crate) fn projected_gradient(g: f64, mu: f64, c: f64) -> f64 {
    if mu <= 0.0 {
        g.min(0.0)
    } else if mu >= c {
        g.max(0.0)
    } else {
        g
    }
}
