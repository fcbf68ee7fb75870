//! One-sided Jacobi singular value decomposition.
//!
//! Rank decisions, principal angles and balancing all need singular
//! vectors accurate to machine precision, including on (nearly) rank
//! deficient blocks. The one-sided Jacobi iteration delivers high
//! relative accuracy at the dense sizes used here, so it backs every
//! rank-revealing step in the crate.

use super::orthonormal_completion;
use crate::{Mat, Vector};

/// Thin singular value decomposition `A = U diag(sigma) V'` with
/// `U` (m x k), `V` (n x k), `k = min(m, n)` and `sigma` descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Mat,
    pub sigma: Vector,
    pub v: Mat,
}

impl Svd {
    /// Number of singular values strictly above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.sigma.iter().filter(|&&s| s > tol).count()
    }

    /// Least-squares / minimum-norm solve via the pseudoinverse,
    /// truncating singular values at or below `tol`.
    pub fn pinv_solve(&self, rhs: &Mat, tol: f64) -> Mat {
        let k = self.sigma.len();
        let mut scaled = self.u.transpose() * rhs;
        for i in 0..k {
            let s = self.sigma[i];
            let f = if s > tol { 1.0 / s } else { 0.0 };
            for j in 0..scaled.ncols() {
                scaled[(i, j)] *= f;
            }
        }
        &self.v * scaled
    }

    /// Completes the thin `U` to a full m x m orthogonal basis.
    pub fn u_full(&self) -> Mat {
        orthonormal_completion(&self.u)
    }
}

/// Computes the thin SVD by one-sided Jacobi rotations on the columns.
pub fn jacobi_svd(a: &Mat) -> Svd {
    let m = a.nrows();
    let n = a.ncols();
    if m == 0 || n == 0 {
        return Svd {
            u: Mat::zeros(m, 0),
            sigma: Vector::zeros(0),
            v: Mat::zeros(n, 0),
        };
    }
    if m < n {
        let t = jacobi_svd(&a.transpose());
        return Svd { u: t.v, sigma: t.sigma, v: t.u };
    }

    let mut work = a.clone();
    let mut v = Mat::identity(n, n);
    let eps = f64::EPSILON;
    let max_sweeps = 60;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for i in 0..n.saturating_sub(1) {
            for j in (i + 1)..n {
                let ci = work.column(i);
                let cj = work.column(j);
                let alpha = ci.dot(&ci);
                let beta = cj.dot(&cj);
                let gamma = ci.dot(&cj);
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                if gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut work, i, j, c, s);
                rotate_columns(&mut v, i, j, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    // Column norms are the singular values; sort descending.
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|i| work.column(i).norm()).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let mut u = Mat::zeros(m, n);
    let mut vv = Mat::zeros(n, n);
    let mut sigma = Vector::zeros(n);
    let sig_max = norms[order[0]];
    for (k, &i) in order.iter().enumerate() {
        sigma[k] = norms[i];
        vv.set_column(k, &v.column(i));
        if norms[i] > sig_max * f64::MIN_POSITIVE.sqrt() && norms[i] > 0.0 {
            let col = work.column(i) / norms[i];
            u.set_column(k, &col);
        }
    }
    // Fill any zero-column gaps of U with an orthonormal completion.
    let first_zero = (0..n).find(|&k| u.column(k).norm() == 0.0);
    if let Some(k0) = first_zero {
        let head = u.columns(0, k0).clone_owned();
        let full = orthonormal_completion(&head);
        for k in k0..n {
            u.set_column(k, &full.column(k));
        }
    }
    // Deterministic signs: largest-magnitude entry of each U column
    // is positive.
    for k in 0..n {
        let col = u.column(k);
        let mut idx = 0usize;
        let mut best = 0.0f64;
        for (r, &val) in col.iter().enumerate() {
            if val.abs() > best {
                best = val.abs();
                idx = r;
            }
        }
        if u[(idx, k)] < 0.0 {
            for r in 0..m {
                u[(r, k)] = -u[(r, k)];
            }
            for r in 0..n {
                vv[(r, k)] = -vv[(r, k)];
            }
        }
    }
    Svd { u, sigma, v: vv }
}

fn rotate_columns(m: &mut Mat, i: usize, j: usize, c: f64, s: f64) {
    for r in 0..m.nrows() {
        let a = m[(r, i)];
        let b = m[(r, j)];
        m[(r, i)] = c * a - s * b;
        m[(r, j)] = s * a + c * b;
    }
}
