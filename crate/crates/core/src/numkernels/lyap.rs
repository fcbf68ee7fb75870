//! Bartels-Stewart solvers for dense Lyapunov and Sylvester equations.

use super::schur::{diagonal_blocks, real_schur};
use super::{check_finite, check_square, solve_small_sylvester, symmetrize, SolveReport};
use crate::{Error, Mat, Result};

/// Solves `A X + X A' + M = 0` for symmetric `M`.
///
/// The result is explicitly symmetrized. Unique solvability requires that
/// no two eigenvalues of `A` sum to zero; a violation surfaces as
/// [`Error::SingularPencil`].
pub fn solve_lyapunov(a: &Mat, m: &Mat) -> Result<(Mat, SolveReport)> {
    check_square("A", a)?;
    check_square("M", m)?;
    check_finite("A", a)?;
    check_finite("M", m)?;
    if a.nrows() != m.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "Lyapunov: A is {}x{}, M is {}x{}",
            a.nrows(),
            a.ncols(),
            m.nrows(),
            m.ncols()
        )));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok((
            Mat::zeros(0, 0),
            SolveReport { residual_rel: 0.0, condition_estimate: 0.0 },
        ));
    }
    let msym = symmetrize(m);
    let (u, t) = real_schur(a)?;
    let solve = |rhs: &Mat| -> Result<Mat> {
        let c = -(u.transpose() * rhs * &u);
        let xt = quasi_triangular_lyapunov(&t, &c)?;
        Ok(symmetrize(&(&u * xt * u.transpose())))
    };
    let mut x = solve(&msym)?;
    // Iterative refinement; the Schur form is reused and the forward
    // error drops to near roundoff, which matters when callers subtract
    // trace expressions built from the solution.
    let mut res_norm = (a * &x + &x * a.transpose() + &msym).norm();
    for _ in 0..3 {
        if res_norm == 0.0 {
            break;
        }
        let residual = a * &x + &x * a.transpose() + &msym;
        let Ok(dx) = solve(&residual) else { break };
        let cand = symmetrize(&(&x + &dx));
        let cand_res = (a * &cand + &cand * a.transpose() + &msym).norm();
        if cand_res >= res_norm {
            break;
        }
        x = cand;
        res_norm = cand_res;
    }

    let residual = a * &x + &x * a.transpose() + &msym;
    let denom = (a.norm() * x.norm() * 2.0 + msym.norm()).max(f64::MIN_POSITIVE);
    let report = SolveReport {
        residual_rel: residual.norm() / denom,
        condition_estimate: (a.norm() * x.norm()) / msym.norm().max(f64::MIN_POSITIVE),
    };
    Ok((x, report))
}

/// Solves `A Y + Y F + M = 0` with square `A` (n x n), `F` (r x r) and
/// `M` (n x r). Requires the spectra of `A` and `-F` to be disjoint.
pub fn solve_sylvester(a: &Mat, f: &Mat, m: &Mat) -> Result<(Mat, SolveReport)> {
    check_square("A", a)?;
    check_square("F", f)?;
    check_finite("A", a)?;
    check_finite("F", f)?;
    check_finite("M", m)?;
    if m.nrows() != a.nrows() || m.ncols() != f.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "Sylvester: A is {}x{}, F is {}x{}, M is {}x{}",
            a.nrows(),
            a.ncols(),
            f.nrows(),
            f.ncols(),
            m.nrows(),
            m.ncols()
        )));
    }
    if a.nrows() == 0 || f.nrows() == 0 {
        return Ok((
            Mat::zeros(a.nrows(), f.nrows()),
            SolveReport { residual_rel: 0.0, condition_estimate: 0.0 },
        ));
    }
    let (u, ta) = real_schur(a)?;
    let (v, tf) = real_schur(f)?;
    let solve = |rhs: &Mat| -> Result<Mat> {
        let c = -(u.transpose() * rhs * &v);
        let yt = quasi_triangular_sylvester(&ta, &tf, &c)?;
        Ok(&u * yt * v.transpose())
    };
    let mut y = solve(m)?;
    let mut res_norm = (a * &y + &y * f + m).norm();
    for _ in 0..3 {
        if res_norm == 0.0 {
            break;
        }
        let residual = a * &y + &y * f + m;
        let Ok(dy) = solve(&residual) else { break };
        let cand = &y + &dy;
        let cand_res = (a * &cand + &cand * f + m).norm();
        if cand_res >= res_norm {
            break;
        }
        y = cand;
        res_norm = cand_res;
    }

    let residual = a * &y + &y * f + m;
    let denom = (a.norm() * y.norm() + y.norm() * f.norm() + m.norm()).max(f64::MIN_POSITIVE);
    let report = SolveReport {
        residual_rel: residual.norm() / denom,
        condition_estimate: ((a.norm() + f.norm()) * y.norm()) / m.norm().max(f64::MIN_POSITIVE),
    };
    Ok((y, report))
}

/// Solves `T X + X T' = C` for quasi upper triangular `T` by block back
/// substitution over the diagonal block grid.
fn quasi_triangular_lyapunov(t: &Mat, c: &Mat) -> Result<Mat> {
    let n = t.nrows();
    let blocks = diagonal_blocks(t);
    let nb = blocks.len();
    let mut x = Mat::zeros(n, n);
    for jb in (0..nb).rev() {
        let (jo, js) = blocks[jb];
        for ib in (0..nb).rev() {
            let (io, is) = blocks[ib];
            let mut rhs = c.view((io, jo), (is, js)).clone_owned();
            // minus sum_{k>i} T_ik X_kj
            if io + is < n {
                let t_right = t.view((io, io + is), (is, n - io - is));
                let x_below = x.view((io + is, jo), (n - io - is, js));
                rhs -= t_right * x_below;
            }
            // minus sum_{l>j} X_il (T_jl)'
            if jo + js < n {
                let x_right = x.view((io, jo + js), (is, n - jo - js));
                let t_jrow = t.view((jo, jo + js), (js, n - jo - js));
                rhs -= x_right * t_jrow.transpose();
            }
            let tii = t.view((io, io), (is, is)).clone_owned();
            let tjj = t.view((jo, jo), (js, js)).clone_owned();
            let xij = solve_small_sylvester(&tii, &tjj.transpose(), &rhs).ok_or_else(|| {
                Error::SingularPencil("Lyapunov: eigenvalue sum within tolerance of zero".into())
            })?;
            x.view_mut((io, jo), (is, js)).copy_from(&xij);
        }
    }
    Ok(x)
}

/// Solves `Ta Y + Y Tf = C` for quasi upper triangular `Ta`, `Tf`.
fn quasi_triangular_sylvester(ta: &Mat, tf: &Mat, c: &Mat) -> Result<Mat> {
    let n = ta.nrows();
    let r = tf.nrows();
    let ablocks = diagonal_blocks(ta);
    let fblocks = diagonal_blocks(tf);
    let mut y = Mat::zeros(n, r);
    for &(jo, js) in fblocks.iter() {
        for &(io, is) in ablocks.iter().rev() {
            let mut rhs = c.view((io, jo), (is, js)).clone_owned();
            if io + is < n {
                let t_right = ta.view((io, io + is), (is, n - io - is));
                let y_below = y.view((io + is, jo), (n - io - is, js));
                rhs -= t_right * y_below;
            }
            if jo > 0 {
                let y_left = y.view((io, 0), (is, jo));
                let tf_above = tf.view((0, jo), (jo, js));
                rhs -= y_left * tf_above;
            }
            let tii = ta.view((io, io), (is, is)).clone_owned();
            let tjj = tf.view((jo, jo), (js, js)).clone_owned();
            let yij = solve_small_sylvester(&tii, &tjj, &rhs).ok_or_else(|| {
                Error::SingularPencil("Sylvester: spectra of A and -F intersect".into())
            })?;
            y.view_mut((io, jo), (is, js)).copy_from(&yij);
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xorshift(state: &mut u64) -> f64 {
        *state ^= *state << 13;
        *state ^= *state >> 7;
        *state ^= *state << 17;
        (*state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }

    #[test]
    fn lyapunov_diagonal_case() {
        // A = -I, M = I  =>  X = I/2
        let a = -Mat::identity(2, 2);
        let m = Mat::identity(2, 2);
        let (x, rep) = solve_lyapunov(&a, &m).unwrap();
        assert!((x - Mat::identity(2, 2) * 0.5).norm() < 1e-14);
        assert!(rep.residual_rel < 1e-14);
    }

    #[test]
    fn lyapunov_controllability_gramian_2x2() {
        // Printed Gramian of the order-2 toy model with G = [6; 0].
        let a = Mat::from_row_slice(2, 2, &[-2.0, 1.0, -1.0, -1.0]);
        let g = Mat::from_column_slice(2, 1, &[6.0, 0.0]);
        let m = &g * g.transpose();
        let (x, _) = solve_lyapunov(&a, &m).unwrap();
        let expect = Mat::from_row_slice(2, 2, &[8.0, -2.0, -2.0, 2.0]);
        assert!((x - expect).norm() < 1e-12);
    }

    #[test]
    fn lyapunov_random_residual() {
        let mut s = 2024u64;
        for _ in 0..10 {
            let raw = Mat::from_fn(5, 5, |_, _| xorshift(&mut s));
            let a = raw - Mat::identity(5, 5) * 4.0; // eigenvalue shift into the left half plane
            let g = Mat::from_fn(5, 5, |_, _| xorshift(&mut s));
            let m = &g * g.transpose();
            let (x, rep) = solve_lyapunov(&a, &m).unwrap();
            assert!(rep.residual_rel < 1e-12, "residual {}", rep.residual_rel);
            // Gramian-style solutions of stable equations are PSD.
            let min_eig = super::super::min_sym_eigenvalue(&x);
            assert!(min_eig > -1e-10 * x.norm());
        }
    }

    #[test]
    fn sylvester_printed_cross_solution() {
        // A Y + Y F + B Bh' = 0 with the order-2 toy model against its
        // order-1 surrogate: Y = [108; -36] / 13.
        let a = Mat::from_row_slice(2, 2, &[-2.0, 1.0, -1.0, -1.0]);
        let f = Mat::from_element(1, 1, -2.0);
        let b = Mat::from_column_slice(2, 1, &[6.0, 0.0]);
        let bh = Mat::from_element(1, 1, 6.0);
        let m = &b * bh.transpose();
        let (y, _) = solve_sylvester(&a, &f, &m).unwrap();
        assert!((y[(0, 0)] - 108.0 / 13.0).abs() < 1e-12);
        assert!((y[(1, 0)] + 36.0 / 13.0).abs() < 1e-12);
    }

    #[test]
    fn sylvester_scalar() {
        let a = Mat::from_element(1, 1, -2.0);
        let f = Mat::from_element(1, 1, -3.0);
        let m = Mat::from_element(1, 1, 10.0);
        let (y, _) = solve_sylvester(&a, &f, &m).unwrap();
        assert!((y[(0, 0)] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn sylvester_random_rectangular() {
        let mut s = 77u64;
        for _ in 0..10 {
            let a = Mat::from_fn(6, 6, |_, _| xorshift(&mut s)) - Mat::identity(6, 6) * 5.0;
            let f = Mat::from_fn(3, 3, |_, _| xorshift(&mut s)) - Mat::identity(3, 3) * 5.0;
            let m = Mat::from_fn(6, 3, |_, _| xorshift(&mut s));
            let (_, rep) = solve_sylvester(&a, &f, &m).unwrap();
            assert!(rep.residual_rel < 1e-12, "residual {}", rep.residual_rel);
        }
    }

    #[test]
    fn lyapunov_singular_pencil_detected() {
        // A has eigenvalues +1 and -1: 1 + (-1) = 0 makes the operator singular.
        let a = Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let m = Mat::identity(2, 2);
        assert!(matches!(
            solve_lyapunov(&a, &m),
            Err(Error::SingularPencil(_))
        ));
    }
}
