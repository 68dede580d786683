//! Interior-point ascent of the smallest eigenvalue of a Hankel matrix over
//! a subset of its entries.
//!
//! Maximizes `t` subject to `H(x) - tI ≻ 0` (and `x_k < cap` for free even
//! entries when a cap is given) with the barrier
//! `t/μ + log det(H(x) - tI) + Σ log(cap - x_k)`, damped Newton steps and a
//! geometric schedule for `μ`.

use nalgebra::{DMatrix, DVector};

use crate::linalg::{hankel_matrix, min_eigenvalue};

const ROUNDS: usize = 12;
const NEWTON_STEPS: usize = 40;

#[derive(Debug, Clone)]
pub(crate) struct Ascent {
    pub values: Vec<f64>,
    /// Smallest eigenvalue of the final matrix.
    pub min_eig: f64,
    /// Newton steps taken.
    pub steps: usize,
    /// True when `stop` returned true.
    pub stopped: bool,
}

fn shifted(values: &[f64], t: f64) -> DMatrix<f64> {
    let mut a = hankel_matrix(values).expect("odd length");
    for i in 0..a.nrows() {
        a[(i, i)] -= t;
    }
    a
}

fn objective(values: &[f64], t: f64, mu: f64, free: &[usize], cap: Option<f64>) -> Option<f64> {
    let c = shifted(values, t).cholesky()?;
    let mut f = t / mu + c.l().diagonal().iter().map(|d| 2.0 * d.ln()).sum::<f64>();
    if let Some(cap) = cap {
        for &k in free.iter().filter(|&&k| k % 2 == 0) {
            let room = cap - values[k];
            if !(room > 0.0) {
                return None;
            }
            f += room.ln();
        }
    }
    Some(f)
}

/// Runs the ascent from `values` (length `2n+1`), moving only the indices in
/// `free`. `stop` is consulted after every accepted step.
pub(crate) fn ascend(
    mut values: Vec<f64>,
    free: &[usize],
    cap: Option<f64>,
    budget: usize,
    mut stop: impl FnMut(&[f64]) -> bool,
) -> Ascent {
    let m = free.len();
    let dim = values.len().div_ceil(2);
    let finish = |values: Vec<f64>, steps: usize, stopped: bool| {
        let min_eig = min_eigenvalue(&hankel_matrix(&values).expect("odd length"));
        Ascent {
            values,
            min_eig,
            steps,
            stopped,
        }
    };
    if let Some(cap) = cap {
        for &k in free.iter().filter(|&&k| k % 2 == 0) {
            if !(values[k] < cap) {
                values[k] = 0.5 * cap;
            }
        }
    }
    if stop(&values) {
        return finish(values, 0, true);
    }
    let lambda = min_eigenvalue(&hankel_matrix(&values).expect("odd length"));
    let scale = values.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
    let mut t = lambda - 1e-3 * scale - 1e-3 * lambda.abs();
    let basis: Vec<DMatrix<f64>> = free
        .iter()
        .map(|&k| DMatrix::from_fn(dim, dim, |i, j| if i + j == k { 1.0 } else { 0.0 }))
        .collect();
    let mut mu = scale.max(t.abs());
    let mut steps = 0;
    for _ in 0..ROUNDS {
        for _ in 0..NEWTON_STEPS {
            if steps >= budget {
                return finish(values, steps, false);
            }
            steps += 1;
            let Some(chol) = shifted(&values, t).cholesky() else {
                break;
            };
            let inv = chol.inverse();
            let mut dirs: Vec<DMatrix<f64>> = basis.iter().map(|b| &inv * b).collect();
            dirs.push(-&inv);
            let mut grad = DVector::<f64>::zeros(m + 1);
            let mut hess = DMatrix::<f64>::zeros(m + 1, m + 1);
            for a in 0..=m {
                grad[a] = dirs[a].trace();
                for b in a..=m {
                    let v = -(&dirs[a] * &dirs[b]).trace();
                    hess[(a, b)] = v;
                    hess[(b, a)] = v;
                }
            }
            grad[m] += 1.0 / mu;
            if let Some(cap) = cap {
                for (a, &k) in free.iter().enumerate().filter(|(_, &k)| k % 2 == 0) {
                    let room = cap - values[k];
                    grad[a] -= 1.0 / room;
                    hess[(a, a)] -= 1.0 / (room * room);
                }
            }
            let Some(step) = (-&hess).cholesky().map(|c| c.solve(&grad)) else {
                break;
            };
            let decrement = grad.dot(&step);
            if !(decrement > 1e-10) {
                break;
            }
            let here = objective(&values, t, mu, free, cap).unwrap_or(f64::NEG_INFINITY);
            let mut alpha = 1.0;
            let mut moved = false;
            while alpha > 1e-12 {
                let mut cand = values.clone();
                for (a, &k) in free.iter().enumerate() {
                    cand[k] += alpha * step[a];
                }
                let ct = t + alpha * step[m];
                if let Some(f) = objective(&cand, ct, mu, free, cap) {
                    if f >= here + 0.25 * alpha * decrement {
                        values = cand;
                        t = ct;
                        moved = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !moved {
                break;
            }
            if stop(&values) {
                return finish(values, steps, true);
            }
        }
        mu *= 0.1;
    }
    finish(values, steps, false)
}
