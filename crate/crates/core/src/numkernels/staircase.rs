//! Controllability staircase form.
//!
//! An orthogonal change of basis exposing the controllable subsystem:
//! `V' A V = [[Ac, *], [0, Au]]`, `V' B = [Bc; 0]` with `(Ac, Bc)`
//! controllable at the given rank tolerance. The leading columns of `V`
//! span the controllability space.

use super::{check_finite, check_square, orthonormal_completion};
use crate::{Error, Mat, Result};

/// Result of the staircase reduction.
#[derive(Debug, Clone)]
pub struct Staircase {
    /// Orthogonal transformation, `V' V = I`.
    pub v: Mat,
    /// Dimension of the controllable subsystem.
    pub dim_controllable: usize,
    /// Row ranks of the consecutive stairs.
    pub stair_ranks: Vec<usize>,
}

/// Computes the controllability staircase of `(A, B)` with absolute
/// singular-value tolerance `tol > 0`.
pub fn controllable_staircase(a: &Mat, b: &Mat, tol: f64) -> Result<Staircase> {
    check_square("A", a)?;
    check_finite("A", a)?;
    check_finite("B", b)?;
    if b.nrows() != a.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "staircase: A is {}x{}, B has {} rows",
            a.nrows(),
            a.ncols(),
            b.nrows()
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("staircase tolerance must be positive".into()));
    }
    let n = a.nrows();
    let mut v = Mat::identity(n, n);
    let mut a_work = a.clone();
    let mut b_cur = b.clone();
    let mut offset = 0usize;
    let mut stair_ranks = Vec::new();

    while offset < n {
        let sub = n - offset;
        // Rank-revealing step on the current input block.
        let svd = super::jacobi_svd(&b_cur);
        let rank = svd.rank(tol);
        if rank == 0 {
            break;
        }
        let u_rank = svd.u.columns(0, rank.min(svd.u.ncols())).clone_owned();
        let u_full = orthonormal_completion(&u_rank);

        // Rotate the trailing subproblem.
        let a_sub = a_work.view((offset, offset), (sub, sub)).clone_owned();
        let a_rot = u_full.transpose() * a_sub * &u_full;
        a_work.view_mut((offset, offset), (sub, sub)).copy_from(&a_rot);
        if offset > 0 {
            let top = a_work.view((0, offset), (offset, sub)) * &u_full;
            a_work.view_mut((0, offset), (offset, sub)).copy_from(&top);
            let left = u_full.transpose() * a_work.view((offset, 0), (sub, offset));
            a_work.view_mut((offset, 0), (sub, offset)).copy_from(&left);
        }
        let v_cols = v.view((0, offset), (n, sub)) * &u_full;
        v.view_mut((0, offset), (n, sub)).copy_from(&v_cols);

        stair_ranks.push(rank);
        offset += rank;
        if offset >= n {
            break;
        }
        // Next stair: coupling block into the not-yet-classified states.
        b_cur = a_work.view((offset, offset - rank), (n - offset, rank)).clone_owned();
    }

    Ok(Staircase { v, dim_controllable: offset, stair_ranks })
}

/// Rank of the Krylov controllability matrix `[B, AB, ..., A^{n-1}B]` at
/// tolerance `tol`. Brute-force oracle for the staircase.
pub fn krylov_rank(a: &Mat, b: &Mat, tol: f64) -> usize {
    let n = a.nrows();
    let m = b.ncols();
    let mut k = Mat::zeros(n, n * m);
    let mut blk = b.clone();
    for p in 0..n {
        k.view_mut((0, p * m), (n, m)).copy_from(&blk);
        blk = a * &blk;
    }
    super::jacobi_svd(&k).rank(tol)
}
