//! Positive-real balanced truncation.
//!
//! Balances the minimal solutions of the primal and dual passivity
//! Riccati equations by the square-root method and truncates to order r.
//! The reduced Hamiltonian is the minimal KYP solution of the reduced
//! model itself, so the result is passive by construction.

use super::{MethodTag, RomResult};
use crate::kyp::default_feasibility_tol;
use crate::numkernels::{jacobi_svd, min_sym_eigenvalue, solve_are_extremal, sym_eig, Extremal};
use crate::systems::{lti_to_ph, ExtendedPhSystem, LtiSystem};
use crate::{Error, Mat, Result};

/// Eigenvalue-based factor `M = F F'` for a symmetric positive
/// semidefinite matrix, truncated at relative machine rank.
fn gramian_factor(m: &Mat) -> Mat {
    let (vals, vecs) = sym_eig(m);
    let n = vals.len();
    let lmax = vals[n - 1].max(0.0);
    let cutoff = 2.0 * n as f64 * f64::EPSILON * lmax;
    let keep: Vec<usize> = (0..n).filter(|&i| vals[i] > cutoff).collect();
    let mut f = Mat::zeros(n, keep.len());
    for (k, &i) in keep.iter().enumerate() {
        let col = vecs.column(i) * vals[i].sqrt();
        f.set_column(k, &col);
    }
    f
}

/// Reduces a stable, strictly passive system to order `r` by
/// positive-real balanced truncation.
///
/// A singular feedthrough sum is regularized with `1e-6 I` before the
/// Riccati solves; the regularization is kept in the reduced feedthrough
/// and reported, matching the treatment of benchmark systems without a
/// direct term. Fails with [`Error::RankDeficient`] when fewer than `r`
/// characteristic values exceed the numerical rank cutoff.
pub fn prbt(fom: &LtiSystem, r: usize) -> Result<RomResult> {
    let n = fom.order();
    if r == 0 || r > n {
        return Err(Error::InvalidArgument(format!(
            "reduced order {r} out of range 1..={n}"
        )));
    }
    let abscissa = fom.spectral_abscissa()?;
    if abscissa >= 0.0 {
        return Err(Error::Unstable(abscissa));
    }
    let dsum = &fom.d + fom.d.transpose();
    let needs_eps =
        fom.inputs() > 0 && min_sym_eigenvalue(&dsum) < 1e-12 * dsum.amax().max(1.0);
    let (work, eps) = if needs_eps {
        (fom.with_feedthrough_shift(1e-6), Some(1e-6))
    } else {
        (fom.clone(), None)
    };

    // Primal (observability-like) and dual (controllability-like)
    // minimal positive-real Gramians.
    let x_min = solve_are_extremal(&work.a, &work.b, &work.c, &work.d, Extremal::Min)?.x;
    let y_min = solve_are_extremal(
        &work.a.transpose(),
        &work.c.transpose(),
        &work.b.transpose(),
        &work.d.transpose(),
        Extremal::Min,
    )?
    .x;

    // Square-root balancing.
    let lx = gramian_factor(&x_min);
    let ly = gramian_factor(&y_min);
    let svd = jacobi_svd(&(lx.transpose() * &ly));
    let chars: Vec<f64> = svd.sigma.iter().cloned().collect();
    let rank_tol = chars.first().copied().unwrap_or(0.0) * n as f64 * f64::EPSILON;
    let usable = svd.rank(rank_tol);
    if usable < r {
        return Err(Error::RankDeficient(format!(
            "only {usable} positive characteristic values, requested order {r}"
        )));
    }
    let scale = Mat::from_diagonal(&crate::Vector::from_fn(r, |i, _| 1.0 / chars[i].sqrt()));
    let w_proj = &lx * svd.u.columns(0, r).clone_owned() * &scale;
    let v_proj = &ly * svd.v.columns(0, r).clone_owned() * &scale;

    let rom_lti = LtiSystem {
        a: w_proj.transpose() * &work.a * &v_proj,
        b: w_proj.transpose() * &work.b,
        c: &work.c * &v_proj,
        d: work.d.clone(),
    };

    // Hamiltonian of the reduced model: its own minimal KYP solution.
    let x_rom =
        solve_are_extremal(&rom_lti.a, &rom_lti.b, &rom_lti.c, &rom_lti.d, Extremal::Min)?.x;
    let w = crate::kyp::kyp_matrix(&rom_lti, &x_rom);
    let rom_ph = lti_to_ph(&rom_lti, &x_rom, default_feasibility_tol(&w))?;

    Ok(RomResult {
        rom_ph: ExtendedPhSystem::new(rom_ph),
        rom_lti,
        method: MethodTag::Prbt,
        iterations: None,
        shift_history: None,
        characteristic_values: Some(chars),
        converged: true,
        feedthrough_eps: eps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kyp::is_passive;
    use crate::systems::{evaluate_transfer, validate_ph};
    use nalgebra::Complex;

    fn balanced_fom_positive_case() -> LtiSystem {
        LtiSystem::new(
            Mat::from_row_slice(2, 2, &[-2.0, -4.0, -4.0, -9.0]),
            Mat::from_column_slice(2, 1, &[4.0, 4.0]),
            Mat::from_row_slice(1, 2, &[4.0, 4.0]),
            Mat::from_element(1, 1, 1.0),
        )
        .unwrap()
    }

    fn balanced_fom_counter_case() -> LtiSystem {
        LtiSystem::new(
            Mat::from_row_slice(2, 2, &[-1.0, -4.5, -4.5, -27.0]),
            Mat::from_column_slice(2, 1, &[4.0, 4.0]),
            Mat::from_row_slice(1, 2, &[4.0, 4.0]),
            Mat::from_element(1, 1, 1.0 / 3.0),
        )
        .unwrap()
    }

    #[test]
    fn printed_rom_of_balanced_positive_case() {
        let rom = prbt(&balanced_fom_positive_case(), 1).unwrap();
        assert!((rom.rom_lti.a[(0, 0)] + 2.0).abs() < 1e-10);
        assert!((rom.rom_lti.b[(0, 0)] - 4.0).abs() < 1e-10);
        assert!((rom.rom_lti.c[(0, 0)] - 4.0).abs() < 1e-10);
        assert!((rom.rom_lti.d[(0, 0)] - 1.0).abs() < 1e-14);
        assert!((rom.rom_ph.ph.q[(0, 0)] - 0.5).abs() < 1e-10);
        let chars = rom.characteristic_values.as_ref().unwrap();
        assert!((chars[0] - 0.5).abs() < 1e-10);
        assert!((chars[1] - 0.25).abs() < 1e-10);
    }

    #[test]
    fn printed_rom_of_balanced_counter_case() {
        let rom = prbt(&balanced_fom_counter_case(), 1).unwrap();
        assert!((rom.rom_lti.a[(0, 0)] + 1.0).abs() < 1e-10);
        assert!((rom.rom_lti.b[(0, 0)] - 4.0).abs() < 1e-10);
        assert!((rom.rom_lti.c[(0, 0)] - 4.0).abs() < 1e-10);
        assert!((rom.rom_lti.d[(0, 0)] - 1.0 / 3.0).abs() < 1e-14);
        assert!((rom.rom_ph.ph.q[(0, 0)] - 0.75).abs() < 1e-10);
    }

    #[test]
    fn full_order_truncation_matches_transfer() {
        let fom = balanced_fom_positive_case();
        let rom = prbt(&fom, 2).unwrap();
        let mut state = 77u64;
        for _ in 0..10 {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let w = (state >> 11) as f64 / (1u64 << 53) as f64 * 10.0;
            let s = Complex::new(0.0, w);
            let hf = evaluate_transfer(&fom, s).unwrap();
            let hr = evaluate_transfer(&rom.rom_lti, s).unwrap();
            assert!((hf[(0, 0)] - hr[(0, 0)]).norm() < 1e-8, "at w = {w}");
        }
    }

    #[test]
    fn characteristic_values_extend_between_orders() {
        let fom = balanced_fom_counter_case();
        let r1 = prbt(&fom, 1).unwrap();
        let r2 = prbt(&fom, 2).unwrap();
        let c1 = r1.characteristic_values.unwrap();
        let c2 = r2.characteristic_values.unwrap();
        assert!(c1[0] >= c1[1]);
        for k in 0..2 {
            assert!((c1[k] - c2[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn rom_is_valid_ph_and_passive() {
        let fom = balanced_fom_positive_case();
        let rom = prbt(&fom, 1).unwrap();
        let tol = crate::systems::default_validation_tol(&rom.rom_ph.ph);
        assert!(validate_ph(&rom.rom_ph.ph, tol).is_valid());
        assert!(is_passive(&rom.rom_lti).passive);
        assert!(rom.rom_lti.spectral_abscissa().unwrap() < 0.0);
    }

    #[test]
    fn zero_feedthrough_gets_regularized() {
        // Collocated dissipative system with D = 0.
        let a = Mat::from_row_slice(2, 2, &[-1.0, 0.5, -0.5, -2.0]);
        let b = Mat::from_column_slice(2, 1, &[1.0, 1.0]);
        let c = b.transpose();
        let fom = LtiSystem::new(a, b, c, Mat::zeros(1, 1)).unwrap();
        let rom = prbt(&fom, 1).unwrap();
        assert_eq!(rom.feedthrough_eps, Some(1e-6));
        assert!((rom.rom_lti.d[(0, 0)] - 1e-6).abs() < 1e-18);
    }
}
