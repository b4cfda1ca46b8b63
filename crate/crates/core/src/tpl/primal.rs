//! Primal path: accelerated projected gradient on a Huber-smoothed hinge with
//! a continuation on the smoothing width, finished by an active-set solve
//! that recovers the exact nonsmooth optimum.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::grid::Shape;
use crate::numeric::dot;
use crate::value::PiecewiseValueFunction;

use super::kkt::{kkt_residual, margins, primal_objective, project_nonneg, weighted_sum};
use super::{check_problem, PairwiseSample, SolverOptions, SolverReport};

const FIRST_WIDTH: f64 = 1.0;
const LAST_WIDTH: f64 = 1e-12;
const POLISH_ROUNDS: usize = 8;

struct Smoothed<'a> {
    pairs: &'a [PairwiseSample],
    c: f64,
    eps: f64,
}

impl Smoothed<'_> {
    /// Huber weight `C * clamp(z / eps, 0, 1)` of a pair with hinge argument `z`.
    fn multiplier(&self, z: f64) -> f64 {
        self.c * (z / self.eps).clamp(0.0, 1.0)
    }

    fn loss(&self, z: f64) -> f64 {
        if z <= 0.0 {
            0.0
        } else if z < self.eps {
            self.c * z * z / (2.0 * self.eps)
        } else {
            self.c * (z - 0.5 * self.eps)
        }
    }

    fn value(&self, u: &[f64]) -> f64 {
        let hinge: f64 = self.pairs.iter().map(|p| self.loss(1.0 - p.y * dot(&p.v_diff, u))).sum();
        0.5 * dot(u, u) + hinge
    }

    fn value_grad(&self, u: &[f64]) -> (f64, Vec<f64>) {
        let mut grad = u.to_vec();
        let mut value = 0.5 * dot(u, u);
        for p in self.pairs {
            let z = 1.0 - p.y * dot(&p.v_diff, u);
            if z > 0.0 {
                value += self.loss(z);
                let s = self.multiplier(z) * p.y;
                for (g, v) in grad.iter_mut().zip(&p.v_diff) {
                    *g -= s * v;
                }
            }
        }
        (value, grad)
    }

    fn multipliers(&self, u: &[f64]) -> Vec<f64> {
        margins(self.pairs, u).iter().map(|m| self.multiplier(1.0 - m)).collect()
    }
}

/// Runs FISTA with backtracking and function-value restarts until the
/// gradient mapping falls below `stage_tol`. Returns the iterations used.
fn fista(sm: &Smoothed<'_>, u: &mut Vec<f64>, lipschitz: &mut f64, stage_tol: f64, budget: usize) -> usize {
    let mut x = u.clone();
    let mut fx = sm.value(&x);
    let mut y = x.clone();
    let mut t = 1.0_f64;
    let mut used = 0;
    while used < budget {
        used += 1;
        let (fy, gy) = sm.value_grad(&y);
        let (x_new, f_new, step) = loop {
            let l = *lipschitz;
            let x_new: Vec<f64> = y.iter().zip(&gy).map(|(yk, gk)| (yk - gk / l).max(0.0)).collect();
            let d: Vec<f64> = x_new.iter().zip(&y).map(|(a, b)| a - b).collect();
            let f_new = sm.value(&x_new);
            if f_new <= fy + dot(&gy, &d) + 0.5 * l * dot(&d, &d) + 1e-13 * fy.abs().max(1.0) {
                let step = d.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())) * l;
                break (x_new, f_new, step);
            }
            *lipschitz *= 2.0;
        };
        if f_new > fx {
            t = 1.0;
            y.clone_from(&x);
            continue;
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_next;
        y = x_new.iter().zip(&x).map(|(a, b)| a + beta * (a - b)).collect();
        x = x_new;
        fx = f_new;
        t = t_next;
        if step <= stage_tol {
            break;
        }
    }
    *u = x;
    used
}

#[derive(Clone, Copy, PartialEq)]
enum Side {
    Lower,
    Upper,
    Free,
}

/// Guesses the optimal active sets from a near-optimal `u`, solves the
/// resulting linear system for the free multipliers and verifies the
/// candidate. Up to a few rounds of set corrections are attempted.
fn polish(pairs: &[PairwiseSample], c: f64, u: &[f64], eps: f64, tol: f64) -> Option<(Vec<f64>, Vec<f64>)> {
    let dim = u.len();
    let delta = (4.0 * eps).max(1e-9);
    let mut sides: Vec<Side> = margins(pairs, u)
        .iter()
        .map(|m| {
            if *m < 1.0 - delta {
                Side::Upper
            } else if *m > 1.0 + delta {
                Side::Lower
            } else {
                Side::Free
            }
        })
        .collect();
    let mut coords: Vec<usize> = (0..dim).filter(|&k| u[k] > 0.0).collect();

    for _ in 0..POLISH_ROUNDS {
        let free: Vec<usize> = (0..pairs.len()).filter(|&i| sides[i] == Side::Free).collect();
        if free.len() > 2 * dim + 64 {
            // Sets are still far from identified; a dense solve would be wasted.
            return None;
        }
        let mut mu: Vec<f64> =
            sides.iter().map(|s| if *s == Side::Upper { c } else { 0.0 }).collect();
        if !free.is_empty() && !coords.is_empty() {
            let fixed = weighted_sum(pairs, &mu, dim);
            let a = DMatrix::from_fn(free.len(), coords.len(), |r, col| {
                let p = &pairs[free[r]];
                p.y * p.v_diff[coords[col]]
            });
            let rhs = DVector::from_iterator(
                free.len(),
                free.iter().map(|&i| {
                    let p = &pairs[i];
                    1.0 - p.y * coords.iter().map(|&k| p.v_diff[k] * fixed[k]).sum::<f64>()
                }),
            );
            let svd = a.svd(true, false);
            let left = svd.u?;
            let smax = svd.singular_values.iter().fold(0.0_f64, |a, &b| a.max(b));
            let mut sol = DVector::zeros(free.len());
            for (k, &s) in svd.singular_values.iter().enumerate() {
                if s > 1e-8 * smax {
                    let col = left.column(k);
                    sol += col * (col.dot(&rhs) / (s * s));
                }
            }
            for (r, &i) in free.iter().enumerate() {
                mu[i] = sol[r];
            }
        }
        let raw = mu.clone();
        for m in &mut mu {
            *m = m.clamp(0.0, c);
        }
        let w = weighted_sum(pairs, &mu, dim);
        let candidate = project_nonneg(&w);
        if kkt_residual(pairs, c, &candidate, &mu) < tol {
            return Some((candidate, mu));
        }

        let new_margins = margins(pairs, &candidate);
        let mut changed = false;
        for i in 0..pairs.len() {
            let next = match sides[i] {
                Side::Free if raw[i] < 0.0 => Side::Lower,
                Side::Free if raw[i] > c => Side::Upper,
                Side::Lower if new_margins[i] < 1.0 - 1e-12 => Side::Free,
                Side::Upper if new_margins[i] > 1.0 + 1e-12 => Side::Free,
                s => s,
            };
            changed |= next != sides[i];
            sides[i] = next;
        }
        let next_coords: Vec<usize> = (0..dim).filter(|&k| w[k] > 0.0).collect();
        changed |= next_coords != coords;
        coords = next_coords;
        if !changed {
            break;
        }
    }
    None
}

/// Minimizes `1/2 ||u||^2 + C sum_i max(0, 1 - y_i u . v_i)` over `u >= 0`.
///
/// A report with `converged = false` is returned when the budget runs out.
pub fn solve_primal(
    pairs: &[PairwiseSample],
    shape: Shape,
    options: &SolverOptions,
) -> Result<(PiecewiseValueFunction, SolverReport)> {
    check_problem(pairs, shape, options)?;
    let c = options.c;
    let vmax = pairs.iter().map(|p| dot(&p.v_diff, &p.v_diff).sqrt()).fold(1.0_f64, f64::max);
    let mut u = vec![0.0; shape.len()];
    let mut lipschitz = 1.0;
    let mut iterations = 0;
    let mut eps = FIRST_WIDTH;
    let mut best: Option<(Vec<f64>, Vec<f64>)> = None;

    while iterations < options.max_iter {
        let sm = Smoothed { pairs, c, eps };
        let stage_tol = (0.1 * eps / vmax).max(0.1 * options.tol / vmax);
        iterations += fista(&sm, &mut u, &mut lipschitz, stage_tol, options.max_iter - iterations);
        if let Some(found) = polish(pairs, c, &u, eps, options.tol) {
            best = Some(found);
            break;
        }
        best = Some((u.clone(), sm.multipliers(&u)));
        if eps <= LAST_WIDTH {
            break;
        }
        eps *= 0.1;
        lipschitz *= 10.0;
    }

    let (u, mu) = best.unwrap_or_else(|| (u.clone(), vec![0.0; pairs.len()]));
    let residual = kkt_residual(pairs, c, &u, &mu);
    let report = SolverReport {
        objective: primal_objective(pairs, c, &u),
        dual_mu: None,
        dual_slack: None,
        iterations,
        converged: residual < options.tol,
        kkt_residual: residual,
    };
    Ok((PiecewiseValueFunction::from_increments(shape, u)?, report))
}
