//! Dense matrix-equation and decomposition kernels.
//!
//! Everything here works on `DMatrix<f64>` at desk scale (n up to a few
//! thousand). Lyapunov and Sylvester equations are solved by
//! Bartels-Stewart on real Schur forms; the algebraic Riccati equation by
//! selecting an invariant subspace of the associated Hamiltonian matrix
//! through an ordered real Schur decomposition, which gives direct access
//! to both the stabilizing (minimal) and anti-stabilizing (maximal)
//! solutions.

mod are;
mod eig;
mod lyap;
mod schur;
mod staircase;
mod svd;

pub use are::{solve_are_extremal, solve_are_shifted, AreSolution, Extremal};
pub use eig::{complex_eig, eigenvalues, spectral_abscissa, ComplexEig};
pub use lyap::{solve_lyapunov, solve_sylvester};
pub use schur::{balance, ordered_real_schur, real_schur, schur_eigenvalues, SchurSelect};
pub use staircase::{controllable_staircase, krylov_rank, Staircase};
pub use svd::{jacobi_svd, Svd};

use crate::{Error, Mat, Result};

/// Diagnostics attached to a matrix-equation solve.
#[derive(Debug, Clone, Copy)]
pub struct SolveReport {
    /// Relative Frobenius norm of the residual of the defining equation.
    pub residual_rel: f64,
    /// Cheap forward-stability proxy: growth of the solution relative to
    /// the data. Not a true condition number.
    pub condition_estimate: f64,
}

/// `(M + M') / 2`
pub fn symmetrize(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

/// `(M - M') / 2`
pub fn skew_part(m: &Mat) -> Mat {
    (m - m.transpose()) * 0.5
}

/// Default numerical rank tolerance: `max(rows, cols) * eps * sigma_max`.
pub fn default_rank_tol(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON * sigma_max
}

pub(crate) fn check_finite(name: &str, m: &Mat) -> Result<()> {
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite(name.to_string()));
    }
    Ok(())
}

pub(crate) fn check_square(name: &str, m: &Mat) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{name} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Eigendecomposition of a symmetric matrix with eigenvalues sorted
/// ascending; the returned eigenvector matrix is orthogonal.
pub fn sym_eig(s: &Mat) -> (crate::Vector, Mat) {
    let n = s.nrows();
    let se = symmetrize(s).symmetric_eigen();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));
    let vals = crate::Vector::from_fn(n, |i, _| se.eigenvalues[idx[i]]);
    let mut vecs = Mat::zeros(n, n);
    for (k, &i) in idx.iter().enumerate() {
        vecs.set_column(k, &se.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_sym_eigenvalue(s: &Mat) -> f64 {
    if s.nrows() == 0 {
        return 0.0;
    }
    let se = symmetrize(s).symmetric_eigen();
    se.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Extends a matrix with orthonormal columns to a full orthogonal basis.
/// Uses two rounds of Gram-Schmidt against unit vectors.
pub fn orthonormal_completion(q_thin: &Mat) -> Mat {
    let n = q_thin.nrows();
    let k = q_thin.ncols();
    let mut q = Mat::zeros(n, n);
    q.view_mut((0, 0), (n, k)).copy_from(q_thin);
    let mut filled = k;
    for cand in 0..n {
        if filled == n {
            break;
        }
        let mut v = crate::Vector::zeros(n);
        v[cand] = 1.0;
        for _ in 0..2 {
            for j in 0..filled {
                let qj = q.column(j);
                let proj = qj.dot(&v);
                v -= proj * crate::Vector::from(qj);
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            v /= norm;
            q.set_column(filled, &v);
            filled += 1;
        }
    }
    assert_eq!(filled, n, "orthonormal completion failed");
    q
}

/// Solves the small Sylvester system `A X + X B = C` with `A`, `B` of
/// size at most 2x2 via the Kronecker formulation. Returns `None` when
/// the pencil is numerically singular.
pub(crate) fn solve_small_sylvester(a: &Mat, b: &Mat, c: &Mat) -> Option<Mat> {
    let p = a.nrows();
    let q = b.nrows();
    let mut k = Mat::zeros(p * q, p * q);
    // vec(AX) = (I (x) A) vec(X); vec(XB) = (B' (x) I) vec(X)
    for j in 0..q {
        for i in 0..p {
            let row = j * p + i;
            for l in 0..p {
                k[(row, j * p + l)] += a[(i, l)];
            }
            for l in 0..q {
                k[(row, l * p + i)] += b[(l, j)];
            }
        }
    }
    let rhs = Mat::from_fn(p * q, 1, |r, _| c[(r % p, r / p)]);
    let svd = svd::jacobi_svd(&k);
    let smax = svd.sigma[0];
    let smin = svd.sigma[p * q - 1];
    if smin <= 64.0 * f64::EPSILON * smax.max(f64::MIN_POSITIVE) {
        return None;
    }
    let sol = svd.pinv_solve(&rhs, 0.0);
    if !sol.iter().all(|x| x.is_finite()) {
        return None;
    }
    Some(Mat::from_fn(p, q, |i, j| sol[(j * p + i, 0)]))
}
