//! Dual path: cyclic coordinate descent on
//! `D(mu) = 1/2 ||P+(w(mu))||^2 - sum mu` over the box `[0, C]`, where the
//! inner minimization over `u >= 0` has been carried out in closed form.

use crate::error::Result;
use crate::grid::Shape;
use crate::value::PiecewiseValueFunction;

use super::kkt::{kkt_residual, primal_objective, project_nonneg, projected_gradient, weighted_sum};
use super::{check_problem, PairwiseSample, SolverOptions, SolverReport};

/// Exact minimizer over `delta in [lo, hi]` of the convex piecewise quadratic
/// `1/2 ||P+(w + delta a)||^2 - delta`, whose derivative
/// `a . P+(w + delta a) - 1` is piecewise linear and nondecreasing.
fn line_minimize(w: &[f64], a: &[f64], lo: f64, hi: f64, breaks: &mut Vec<(f64, usize)>) -> f64 {
    let slope_at = |delta: f64| -> f64 {
        w.iter().zip(a).map(|(wk, ak)| ak * (wk + delta * ak).max(0.0)).sum::<f64>() - 1.0
    };
    if slope_at(lo) >= 0.0 {
        return lo;
    }
    if slope_at(hi) <= 0.0 {
        return hi;
    }
    breaks.clear();
    breaks.extend(
        w.iter()
            .zip(a)
            .enumerate()
            .filter(|(_, (_, ak))| **ak != 0.0)
            .map(|(k, (wk, ak))| (-wk / ak, k))
            .filter(|(b, _)| *b > lo && *b < hi),
    );
    breaks.sort_unstable_by(|x, y| x.0.total_cmp(&y.0));

    // Active set on the open interval to the right of `lo`.
    let first_right = breaks.first().map_or(hi, |b| b.0);
    let probe = 0.5 * (lo + first_right);
    let (mut intercept, mut slope) = (0.0, 0.0);
    for (wk, ak) in w.iter().zip(a) {
        if wk + probe * ak > 0.0 {
            intercept += ak * wk;
            slope += ak * ak;
        }
    }
    let mut left = lo;
    for idx in 0..=breaks.len() {
        let right = breaks.get(idx).map_or(hi, |b| b.0);
        if slope > 0.0 {
            let root = (1.0 - intercept) / slope;
            if root <= right {
                return root.clamp(left, right);
            }
        }
        if let Some(&(_, k)) = breaks.get(idx) {
            let sign = if a[k] > 0.0 { 1.0 } else { -1.0 };
            intercept += sign * a[k] * w[k];
            slope += sign * a[k] * a[k];
        }
        left = right;
    }
    hi
}

/// Solves the dual and maps the multipliers back to `u = P+(w(mu))`.
///
/// `max_iter` counts full sweeps over the pairs.
pub fn solve_dual(
    pairs: &[PairwiseSample],
    shape: Shape,
    options: &SolverOptions,
) -> Result<(PiecewiseValueFunction, SolverReport)> {
    check_problem(pairs, shape, options)?;
    let c = options.c;
    let dim = shape.len();
    let signed: Vec<Vec<f64>> = pairs.iter().map(|p| p.v_diff.iter().map(|v| p.y * v).collect()).collect();
    let mut mu = vec![0.0; pairs.len()];
    let mut w = vec![0.0; dim];
    let mut breaks = Vec::with_capacity(dim);
    let mut iterations = 0;
    let mut residual = f64::INFINITY;

    while iterations < options.max_iter {
        iterations += 1;
        let mut sweep_max = 0.0_f64;
        for (i, a) in signed.iter().enumerate() {
            let g: f64 = a.iter().zip(&w).map(|(ak, wk): (&f64, &f64)| ak * wk.max(0.0)).sum::<f64>() - 1.0;
            let pg = projected_gradient(g, mu[i], c).abs();
            sweep_max = sweep_max.max(pg);
            if pg == 0.0 {
                continue;
            }
            let delta = line_minimize(&w, a, -mu[i], c - mu[i], &mut breaks);
            let next = (mu[i] + delta).clamp(0.0, c);
            let step = next - mu[i];
            if step != 0.0 {
                for (wk, ak) in w.iter_mut().zip(a) {
                    *wk += step * ak;
                }
                mu[i] = next;
            }
        }
        if sweep_max < options.tol {
            // Rebuild `w` to shed accumulated rounding before the final check.
            w = weighted_sum(pairs, &mu, dim);
            let u = project_nonneg(&w);
            residual = kkt_residual(pairs, c, &u, &mu);
            if residual < options.tol {
                break;
            }
        }
    }

    let w = weighted_sum(pairs, &mu, dim);
    let u = project_nonneg(&w);
    if !residual.is_finite() || residual >= options.tol {
        residual = kkt_residual(pairs, c, &u, &mu);
    }
    let slack: Vec<f64> = u.iter().zip(&w).map(|(uk, wk)| uk - wk).collect();
    let report = SolverReport {
        objective: primal_objective(pairs, c, &u),
        dual_mu: Some(mu),
        dual_slack: Some(slack),
        iterations,
        converged: residual < options.tol,
        kkt_residual: residual,
    };
    Ok((PiecewiseValueFunction::from_increments(shape, u)?, report))
}
