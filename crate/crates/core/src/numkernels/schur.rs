//! Real Schur decomposition with eigenvalue reordering.
//!
//! nalgebra provides the unordered real Schur form. Reordering moves a
//! selected group of eigenvalues to the leading diagonal blocks by
//! swapping adjacent 1x1/2x2 blocks: each swap solves a small Sylvester
//! equation and applies an orthogonal transformation built from the QR
//! factorization of the stacked solution, the classical direct-swap
//! procedure.

use super::{check_finite, check_square, orthonormal_completion, solve_small_sylvester};
use crate::{Error, Mat, Result};
use nalgebra::Complex;

/// Diagonal similarity balancing (radix-2 Parlett-Reinsch sweep):
/// returns the scale vector `d` and `D^{-1} A D`, which shares the
/// spectrum of `A` with much better eigenvalue conditioning on badly
/// scaled inputs. Invariant subspace bases of the balanced matrix map
/// back through row-wise multiplication by `d`.
pub fn balance(a: &Mat) -> (crate::Vector, Mat) {
    let n = a.nrows();
    let mut m = a.clone();
    let mut d = crate::Vector::from_element(n, 1.0);
    for _ in 0..50 {
        let mut changed = false;
        for i in 0..n {
            let mut c: f64 = (0..n).filter(|&j| j != i).map(|j| m[(j, i)].abs()).sum();
            let mut r: f64 = (0..n).filter(|&j| j != i).map(|j| m[(i, j)].abs()).sum();
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0f64;
            while c < r / 2.0 {
                c *= 2.0;
                r /= 2.0;
                f *= 2.0;
            }
            while c >= r * 2.0 {
                c /= 2.0;
                r *= 2.0;
                f /= 2.0;
            }
            if f != 1.0 && c + r < 0.95 * s {
                changed = true;
                d[i] *= f;
                for j in 0..n {
                    m[(i, j)] /= f;
                }
                for j in 0..n {
                    m[(j, i)] *= f;
                }
            }
        }
        if !changed {
            break;
        }
    }
    (d, m)
}

/// Real Schur decomposition `A = Q T Q'` with `Q` orthogonal and `T`
/// quasi upper triangular. 2x2 diagonal blocks with real eigenvalues are
/// split, so every 2x2 block left on the diagonal carries a complex pair.
pub fn real_schur(a: &Mat) -> Result<(Mat, Mat)> {
    check_square("A", a)?;
    check_finite("A", a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok((Mat::zeros(0, 0), Mat::zeros(0, 0)));
    }
    let max_iter = 75 * n.max(10);
    let schur = nalgebra::linalg::Schur::try_new(a.clone(), f64::EPSILON, max_iter)
        .ok_or(Error::SchurNoConvergence(n))?;
    let (q, t) = schur.unpack();
    let (q, t) = split_real_blocks(q, t);
    Ok((q, t))
}

/// Diagonal block layout of a quasi-triangular matrix: `(offset, size)`
/// with size 1 or 2.
pub(crate) fn diagonal_blocks(t: &Mat) -> Vec<(usize, usize)> {
    let n = t.nrows();
    let mut blocks = Vec::new();
    let mut k = 0;
    while k < n {
        if k + 1 < n && subdiag_coupled(t, k) {
            blocks.push((k, 2));
            k += 2;
        } else {
            blocks.push((k, 1));
            k += 1;
        }
    }
    blocks
}

fn subdiag_coupled(t: &Mat, k: usize) -> bool {
    let scale = t[(k, k)].abs() + t[(k + 1, k + 1)].abs();
    t[(k + 1, k)].abs() > f64::EPSILON * scale.max(f64::MIN_POSITIVE)
}

/// Eigenvalues of a 1x1 or 2x2 diagonal block.
fn block_eigenvalues(t: &Mat, off: usize, size: usize) -> [Complex<f64>; 2] {
    if size == 1 {
        let l = Complex::new(t[(off, off)], 0.0);
        return [l, l];
    }
    let a = t[(off, off)];
    let b = t[(off, off + 1)];
    let c = t[(off + 1, off)];
    let d = t[(off + 1, off + 1)];
    let mean = 0.5 * (a + d);
    let disc = 0.25 * (a - d) * (a - d) + b * c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        [Complex::new(mean + s, 0.0), Complex::new(mean - s, 0.0)]
    } else {
        let s = (-disc).sqrt();
        [Complex::new(mean, s), Complex::new(mean, -s)]
    }
}

/// Eigenvalues read off the quasi-triangular factor.
pub fn schur_eigenvalues(t: &Mat) -> Vec<Complex<f64>> {
    let mut out = Vec::with_capacity(t.nrows());
    for (off, size) in diagonal_blocks(t) {
        let ls = block_eigenvalues(t, off, size);
        out.push(ls[0]);
        if size == 2 {
            out.push(ls[1]);
        }
    }
    out
}

/// Splits 2x2 diagonal blocks that carry two real eigenvalues into a pair
/// of 1x1 blocks via a Givens rotation, so that swapping logic can treat
/// every real eigenvalue independently.
fn split_real_blocks(mut q: Mat, mut t: Mat) -> (Mat, Mat) {
    let n = t.nrows();
    let mut k = 0;
    while k + 1 < n {
        if !subdiag_coupled(&t, k) {
            k += 1;
            continue;
        }
        let a = t[(k, k)];
        let b = t[(k, k + 1)];
        let c = t[(k + 1, k)];
        let d = t[(k + 1, k + 1)];
        let disc = 0.25 * (a - d) * (a - d) + b * c;
        if disc < 0.0 {
            k += 2;
            continue;
        }
        // Real pair: rotate so the eigenvector of one eigenvalue becomes e1.
        let s = disc.sqrt();
        let l1 = 0.5 * (a + d) + if a - d >= 0.0 { s } else { -s };
        // (A - l1 I) v = 0 on the block
        let (mut vx, mut vy) = if b.abs() > c.abs() {
            (b, l1 - a)
        } else {
            (l1 - d, c)
        };
        let norm = (vx * vx + vy * vy).sqrt();
        if norm < f64::MIN_POSITIVE {
            k += 2;
            continue;
        }
        vx /= norm;
        vy /= norm;
        let g = Mat::from_row_slice(2, 2, &[vx, -vy, vy, vx]);
        let mut rows = t.rows_mut(k, 2).clone_owned();
        rows = g.transpose() * rows;
        t.rows_mut(k, 2).copy_from(&rows);
        let mut cols = t.columns_mut(k, 2).clone_owned();
        cols *= &g;
        t.columns_mut(k, 2).copy_from(&cols);
        let mut qc = q.columns_mut(k, 2).clone_owned();
        qc *= &g;
        q.columns_mut(k, 2).copy_from(&qc);
        t[(k + 1, k)] = 0.0;
        k += 1;
    }
    (q, t)
}

/// Eigenvalue selection for [`ordered_real_schur`].
#[derive(Debug, Clone, Copy)]
pub enum SchurSelect {
    /// Re(lambda) < -threshold
    StableHalfPlane { axis_tol: f64 },
    /// Re(lambda) > threshold
    AntiStableHalfPlane { axis_tol: f64 },
}

impl SchurSelect {
    fn selects(&self, re: f64) -> Result<bool> {
        match *self {
            SchurSelect::StableHalfPlane { axis_tol } => {
                if re.abs() <= axis_tol {
                    Err(Error::NoStableInvariantSubspace(axis_tol))
                } else {
                    Ok(re < 0.0)
                }
            }
            SchurSelect::AntiStableHalfPlane { axis_tol } => {
                if re.abs() <= axis_tol {
                    Err(Error::NoStableInvariantSubspace(axis_tol))
                } else {
                    Ok(re > 0.0)
                }
            }
        }
    }
}

/// Ordered real Schur decomposition: returns `(Q, T, k)` with the selected
/// eigenvalues occupying the leading `k` diagonal positions of `T`.
pub fn ordered_real_schur(a: &Mat, select: SchurSelect) -> Result<(Mat, Mat, usize)> {
    let (q, t) = real_schur(a)?;
    order_schur(q, t, select)
}

fn order_schur(mut q: Mat, mut t: Mat, select: SchurSelect) -> Result<(Mat, Mat, usize)> {
    let mut blocks = diagonal_blocks(&t);
    let mut selected: Vec<bool> = Vec::with_capacity(blocks.len());
    for &(off, size) in &blocks {
        let re = block_eigenvalues(&t, off, size)[0].re;
        selected.push(select.selects(re)?);
    }
    // Bubble selected blocks to the front, preserving relative order.
    loop {
        let mut swapped_any = false;
        for i in 0..blocks.len().saturating_sub(1) {
            if !selected[i] && selected[i + 1] {
                swap_adjacent_blocks(&mut q, &mut t, &mut blocks, i)?;
                selected.swap(i, i + 1);
                swapped_any = true;
            }
        }
        if !swapped_any {
            break;
        }
    }
    let k: usize = blocks
        .iter()
        .zip(&selected)
        .filter(|(_, &s)| s)
        .map(|(&(_, size), _)| size)
        .sum();
    Ok((q, t, k))
}

/// Swaps diagonal blocks `i` and `i+1` of the quasi-triangular factor by
/// an orthogonal transformation, updating `Q`, `T` and the block layout.
fn swap_adjacent_blocks(
    q: &mut Mat,
    t: &mut Mat,
    blocks: &mut [(usize, usize)],
    i: usize,
) -> Result<()> {
    let (off, p) = blocks[i];
    let (_, r) = blocks[i + 1];
    let w = p + r;
    let n = t.nrows();

    let a11 = t.view((off, off), (p, p)).clone_owned();
    let a12 = t.view((off, off + p), (p, r)).clone_owned();
    let a22 = t.view((off + p, off + p), (r, r)).clone_owned();

    // A11 X - X A22 = -A12, so the columns of [X; I] span the invariant
    // subspace belonging to A22.
    let x = solve_small_sylvester(&a11, &(-&a22), &(-&a12))
        .ok_or_else(|| Error::SingularPencil("eigenvalue swap: clustered eigenvalues".into()))?;
    let mut stacked = Mat::zeros(w, r);
    stacked.view_mut((0, 0), (p, r)).copy_from(&x);
    stacked.view_mut((p, 0), (r, r)).copy_from(&Mat::identity(r, r));
    let qr = stacked.qr();
    let thin = qr.q();
    let qfull = orthonormal_completion(&thin);

    // Apply the window transform to T and accumulate into Q.
    let t_rows = qfull.transpose() * t.view((off, 0), (w, n));
    t.view_mut((off, 0), (w, n)).copy_from(&t_rows);
    let t_cols = t.view((0, off), (n, w)) * &qfull;
    t.view_mut((0, off), (n, w)).copy_from(&t_cols);
    let q_cols = q.view((0, off), (n, w)) * &qfull;
    q.view_mut((0, off), (n, w)).copy_from(&q_cols);

    // The swapped layout is exact by construction.
    for row in r..w {
        for col in 0..r {
            t[(off + row, off + col)] = 0.0;
        }
    }
    blocks[i] = (off, r);
    blocks[i + 1] = (off + r, p);
    Ok(())
}
