//! Half-vectorization of symmetric matrices and the duplication matrix.
//!
//! `vech` stacks the lower triangle column by column; the duplication
//! matrix `D` satisfies `vec(S) = D vech(S)` for symmetric `S`, and
//! gradients pull back through `D'`.

use crate::{Mat, Vector};

/// Packed length for an `r x r` symmetric matrix.
pub fn vech_len(r: usize) -> usize {
    r * (r + 1) / 2
}

/// Lower-triangle column-stacked half-vectorization.
pub fn vech(s: &Mat) -> Vector {
    let r = s.nrows();
    let mut out = Vector::zeros(vech_len(r));
    let mut k = 0;
    for j in 0..r {
        for i in j..r {
            out[k] = s[(i, j)];
            k += 1;
        }
    }
    out
}

/// Inverse of [`vech`]: rebuilds the symmetric matrix.
pub fn vech_inv(v: &Vector, r: usize) -> Mat {
    assert_eq!(v.len(), vech_len(r), "packed length mismatch");
    let mut s = Mat::zeros(r, r);
    let mut k = 0;
    for j in 0..r {
        for i in j..r {
            s[(i, j)] = v[k];
            s[(j, i)] = v[k];
            k += 1;
        }
    }
    s
}

/// Duplication matrix `D` of size `r^2 x r(r+1)/2` with
/// `vec(S) = D vech(S)`.
pub fn duplication_matrix(r: usize) -> Mat {
    let mut d = Mat::zeros(r * r, vech_len(r));
    for j in 0..r {
        for i in 0..r {
            let row = j * r + i;
            let (lo, hi) = (i.min(j), i.max(j));
            // vech index of (hi, lo): offset of column lo plus row gap.
            let col = lo * r - lo * (lo + 1) / 2 + lo + (hi - lo);
            d[(row, col)] = 1.0;
        }
    }
    d
}

/// Gradient pullback `D' vec(G)` without materializing `vec`.
pub fn pullback_gradient(g_matrix: &Mat) -> Vector {
    let r = g_matrix.nrows();
    let mut out = Vector::zeros(vech_len(r));
    let mut k = 0;
    for j in 0..r {
        for i in j..r {
            out[k] = if i == j {
                g_matrix[(i, j)]
            } else {
                g_matrix[(i, j)] + g_matrix[(j, i)]
            };
            k += 1;
        }
    }
    out
}
