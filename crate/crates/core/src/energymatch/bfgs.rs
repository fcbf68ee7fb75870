//! Dense BFGS with Armijo backtracking.
//!
//! The objective may return infinity outside the barrier domain; such
//! trial points simply fail the decrease test and the step shrinks, so
//! no feasibility projection is needed.

use crate::{Mat, Vector};

pub struct BfgsOutcome {
    pub x: Vector,
    #[allow(dead_code)]
    pub f: f64,
    #[allow(dead_code)]
    pub grad_inf_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Final inverse-Hessian model, reusable as a warm start when the
    /// objective changes only slightly.
    pub h: Mat,
}

const ARMIJO_C1: f64 = 1e-4;
const BACKTRACK: f64 = 0.5;
const MAX_BACKTRACKS: usize = 60;

/// Minimizes `f` starting from `x0`. Stops when the max-norm of the
/// gradient drops below `grad_tol * max(1, |f|)` or after `max_iter`
/// iterations.
#[cfg(test)]
pub fn minimize<F>(eval: F, x0: Vector, max_iter: usize, grad_tol: f64) -> BfgsOutcome
where
    F: FnMut(&Vector) -> (f64, Vector),
{
    minimize_warm(eval, x0, max_iter, grad_tol, None)
}

/// Minimize with an optional initial inverse-Hessian model, reused when
/// the objective changes only slightly between barrier stages.
pub fn minimize_warm<F>(
    mut eval: F,
    x0: Vector,
    max_iter: usize,
    grad_tol: f64,
    h0: Option<Mat>,
) -> BfgsOutcome
where
    F: FnMut(&Vector) -> (f64, Vector),
{
    let dim = x0.len();
    let mut x = x0;
    let (mut f, mut g) = eval(&x);
    let mut first_update = h0.is_none();
    let mut h = h0.unwrap_or_else(|| Mat::identity(dim, dim));
    // Step memory: barrier-constrained steps stay short for many
    // consecutive iterations, so the line search resumes near the last
    // accepted length instead of at one.
    let mut step_init = 1.0f64;

    for it in 0..max_iter {
        let gnorm = g.amax();
        if gnorm <= grad_tol * f.abs().max(1.0) {
            return BfgsOutcome { x, f, grad_inf_norm: gnorm, iterations: it, converged: true, h };
        }
        let mut dir = -(&h * &g);
        let mut slope = g.dot(&dir);
        if !(slope < 0.0) {
            // Reset a broken curvature model.
            h = Mat::identity(dim, dim);
            dir = -g.clone();
            slope = g.dot(&dir);
            if !(slope < 0.0) {
                let converged = gnorm <= grad_tol * f.abs().max(1.0);
                return BfgsOutcome { x, f, grad_inf_norm: gnorm, iterations: it, converged, h };
            }
        }

        let mut step = step_init;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let cand = &x + &dir * step;
            let (fc, gc) = eval(&cand);
            if fc.is_finite() && fc <= f + ARMIJO_C1 * step * slope {
                accepted = Some((cand, fc, gc));
                break;
            }
            step *= BACKTRACK;
        }
        step_init = (step * 4.0).min(1.0);
        let Some((x_new, f_new, g_new)) = accepted else {
            // Line search stalled; report the best point found so far.
            return BfgsOutcome { x, f, grad_inf_norm: gnorm, iterations: it, converged: false, h };
        };

        let s = &x_new - &x;
        let y = &g_new - &g;
        let sy = s.dot(&y);
        if sy > 1e-12 * s.norm() * y.norm() {
            if first_update {
                // Scale the initial inverse Hessian to the first
                // curvature sample.
                let yy = y.dot(&y);
                if yy > 0.0 {
                    h = Mat::identity(dim, dim) * (sy / yy);
                }
                first_update = false;
            }
            // BFGS inverse update.
            let hy = &h * &y;
            let yhy = y.dot(&hy);
            let rho = 1.0 / sy;
            // H <- (I - rho s y') H (I - rho y s') + rho s s'
            let s_mat = Mat::from_fn(dim, 1, |i, _| s[i]);
            let hy_mat = Mat::from_fn(dim, 1, |i, _| hy[i]);
            h = &h - (&hy_mat * s_mat.transpose() + &s_mat * hy_mat.transpose()) * rho
                + (&s_mat * s_mat.transpose()) * (rho * rho * yhy + rho);
        }

        x = x_new;
        f = f_new;
        g = g_new;
    }
    let gnorm = g.amax();
    BfgsOutcome {
        converged: gnorm <= grad_tol * f.abs().max(1.0),
        x,
        f,
        grad_inf_norm: gnorm,
        iterations: max_iter,
        h,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let eval = |x: &Vector| {
            let f = (x[0] - 1.0).powi(2) + 10.0 * (x[1] + 2.0).powi(2);
            let g = Vector::from_column_slice(&[2.0 * (x[0] - 1.0), 20.0 * (x[1] + 2.0)]);
            (f, g)
        };
        let out = minimize(eval, Vector::zeros(2), 200, 1e-10);
        assert!(out.converged);
        assert!((out.x[0] - 1.0).abs() < 1e-7);
        assert!((out.x[1] + 2.0).abs() < 1e-7);
    }

    #[test]
    fn barrier_like_objective() {
        // min -2x - ln(1 - x): infinite outside x < 1, stationary where
        // 1/(1-x) = 2.
        let eval = |x: &Vector| {
            let t = x[0];
            if t >= 1.0 {
                (f64::INFINITY, Vector::zeros(1))
            } else {
                (-2.0 * t - (1.0 - t).ln(), Vector::from_column_slice(&[-2.0 + 1.0 / (1.0 - t)]))
            }
        };
        let out = minimize(eval, Vector::zeros(1), 200, 1e-12);
        assert!((out.x[0] - 0.5).abs() < 1e-8, "x = {}", out.x[0]);
    }

    #[test]
    fn rosenbrock_converges() {
        let eval = |x: &Vector| {
            let (a, b) = (1.0, 100.0);
            let f = (a - x[0]).powi(2) + b * (x[1] - x[0] * x[0]).powi(2);
            let g = Vector::from_column_slice(&[
                -2.0 * (a - x[0]) - 4.0 * b * (x[1] - x[0] * x[0]) * x[0],
                2.0 * b * (x[1] - x[0] * x[0]),
            ]);
            (f, g)
        };
        let out = minimize(eval, Vector::from_column_slice(&[-1.2, 1.0]), 500, 1e-10);
        assert!((out.x[0] - 1.0).abs() < 1e-5, "x = {:?}", out.x.as_slice());
        assert!((out.x[1] - 1.0).abs() < 1e-5);
    }
}
