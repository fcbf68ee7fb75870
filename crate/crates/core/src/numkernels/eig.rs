//! Eigenvalues and eigenvectors of real matrices through the real Schur
//! form, with back substitution on the quasi-triangular factor for the
//! eigenvectors.

use super::schur::{diagonal_blocks, real_schur, schur_eigenvalues};
use crate::{CMat, CVector, Mat, Result};
use nalgebra::Complex;

/// Eigenvalues of a real square matrix.
pub fn eigenvalues(a: &Mat) -> Result<Vec<Complex<f64>>> {
    let (_, t) = real_schur(a)?;
    Ok(schur_eigenvalues(&t))
}

/// Largest real part over the spectrum.
pub fn spectral_abscissa(a: &Mat) -> Result<f64> {
    Ok(eigenvalues(a)?
        .into_iter()
        .map(|l| l.re)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Full complex eigendecomposition `A V = V diag(values)`.
#[derive(Debug, Clone)]
pub struct ComplexEig {
    pub values: Vec<Complex<f64>>,
    /// Columns are unit-norm eigenvectors matching `values`.
    pub vectors: CMat,
}

/// Computes eigenvalues and eigenvectors. Vectors of complex conjugate
/// pairs are conjugates of each other. For (numerically) repeated
/// eigenvalues the triangular solves are regularized, which yields some
/// vector in the dominant invariant subspace rather than failing.
pub fn complex_eig(a: &Mat) -> Result<ComplexEig> {
    let n = a.nrows();
    let (u, t) = real_schur(a)?;
    let blocks = diagonal_blocks(&t);
    let u_c = CMat::from_fn(n, n, |i, j| Complex::new(u[(i, j)], 0.0));
    let mut values = Vec::with_capacity(n);
    let mut vectors = CMat::zeros(n, n);
    let mut col = 0usize;
    for (kb, &(ko, ks)) in blocks.iter().enumerate() {
        if ks == 1 {
            let lambda = Complex::new(t[(ko, ko)], 0.0);
            let w = triangular_eigvec(&t, &blocks, kb, lambda);
            let v = normalized(&u_c * w);
            values.push(lambda);
            vectors.set_column(col, &v);
            col += 1;
        } else {
            let a11 = t[(ko, ko)];
            let a12 = t[(ko, ko + 1)];
            let a21 = t[(ko + 1, ko)];
            let a22 = t[(ko + 1, ko + 1)];
            let mean = 0.5 * (a11 + a22);
            let disc = 0.25 * (a11 - a22) * (a11 - a22) + a12 * a21;
            let im = (-disc).max(0.0).sqrt();
            let lambda = Complex::new(mean, im);
            let w = triangular_eigvec(&t, &blocks, kb, lambda);
            let v = normalized(&u_c * w);
            values.push(lambda);
            vectors.set_column(col, &v);
            values.push(lambda.conj());
            let vc = v.map(|z| z.conj());
            vectors.set_column(col + 1, &vc);
            col += 2;
        }
    }
    Ok(ComplexEig { values, vectors })
}

fn normalized(v: CVector) -> CVector {
    let norm = v.norm();
    if norm > 0.0 {
        v / Complex::new(norm, 0.0)
    } else {
        v
    }
}

/// Back substitution for `(T - lambda I) w = 0` on the quasi-triangular
/// factor, seeding the null direction inside block `kb`.
fn triangular_eigvec(
    t: &Mat,
    blocks: &[(usize, usize)],
    kb: usize,
    lambda: Complex<f64>,
) -> CVector {
    let n = t.nrows();
    let (ko, ks) = blocks[kb];
    let mut w = CVector::zeros(n);
    if ks == 1 {
        w[ko] = Complex::new(1.0, 0.0);
    } else {
        let a11 = Complex::new(t[(ko, ko)], 0.0);
        let a12 = Complex::new(t[(ko, ko + 1)], 0.0);
        let a21 = Complex::new(t[(ko + 1, ko)], 0.0);
        let a22 = Complex::new(t[(ko + 1, ko + 1)], 0.0);
        // Null vector of the 2x2 block minus lambda.
        let (x, y) = if a12.norm() >= a21.norm() {
            (a12, lambda - a11)
        } else {
            (lambda - a22, a21)
        };
        let norm = (x.norm_sqr() + y.norm_sqr()).sqrt();
        w[ko] = x / norm;
        w[ko + 1] = y / norm;
    }
    let scale = t.amax().max(1.0);
    for ib in (0..kb).rev() {
        let (io, is) = blocks[ib];
        // rhs = -(T w) restricted to rows of block ib, columns right of it
        let mut rhs = CVector::zeros(is);
        for r in 0..is {
            let mut acc = Complex::new(0.0, 0.0);
            for c in (io + is)..(ko + ks) {
                acc += Complex::new(t[(io + r, c)], 0.0) * w[c];
            }
            rhs[r] = -acc;
        }
        if is == 1 {
            let mut d = Complex::new(t[(io, io)], 0.0) - lambda;
            if d.norm() < f64::EPSILON * scale {
                d += Complex::new(f64::EPSILON * scale, f64::EPSILON * scale);
            }
            w[io] = rhs[0] / d;
        } else {
            let m11 = Complex::new(t[(io, io)], 0.0) - lambda;
            let m12 = Complex::new(t[(io, io + 1)], 0.0);
            let m21 = Complex::new(t[(io + 1, io)], 0.0);
            let m22 = Complex::new(t[(io + 1, io + 1)], 0.0) - lambda;
            let mut det = m11 * m22 - m12 * m21;
            if det.norm() < (f64::EPSILON * scale).powi(2) {
                det += Complex::new((f64::EPSILON * scale).powi(2), 0.0);
            }
            w[io] = (m22 * rhs[0] - m12 * rhs[1]) / det;
            w[io + 1] = (m11 * rhs[1] - m21 * rhs[0]) / det;
        }
    }
    w
}
