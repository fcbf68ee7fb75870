//! Gramians and H2 norms for linear and quadratic-output dynamics.
//!
//! Beyond the classical controllability/observability pair, quadratic
//! outputs bring a third Gramian: for `y = x' Q x / 2` the quadratic
//! observability Gramian solves `A' O + O A + Q P Q / 4 = 0` with `P` the
//! controllability Gramian, and
//!
//! ```text
//! |S_H|^2 = tr(B' O B) = tr(P Q P Q) / 4.
//! ```
//!
//! Distances between two quadratic-output systems use the three-trace
//! formula with a cross Sylvester solution; it is the cheaper route when
//! the reduced Hamiltonian varies because `P`, `Pr` and `Y` stay fixed.

use crate::numkernels::{solve_lyapunov, solve_sylvester, sym_eig, symmetrize};
use crate::systems::{ExtendedPhSystem, LtiSystem, LtiqoSystem};
use crate::{Error, Mat, Result};

/// Rank-revealing factor `F` with `P = F F'` for symmetric positive
/// semidefinite `P`, dropping eigendirections below `2 n eps lambda_max`.
/// Truncating instead of square-rooting near-zero eigenvalues keeps the
/// factor entries accurate to relative machine precision.
fn psd_factor(p: &Mat) -> Mat {
    let (vals, vecs) = sym_eig(p);
    let n = vals.len();
    if n == 0 {
        return Mat::zeros(0, 0);
    }
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

/// Assembles the joint controllability Gramian `[[P, Y], [Y', Pr]]` of a
/// block-diagonal pair from the individual solutions.
fn joint_gramian(p: &Mat, pr: &Mat, y: &Mat) -> Mat {
    let n = p.nrows();
    let r = pr.nrows();
    let mut pj = Mat::zeros(n + r, n + r);
    pj.view_mut((0, 0), (n, n)).copy_from(p);
    pj.view_mut((0, n), (n, r)).copy_from(y);
    pj.view_mut((n, 0), (r, n)).copy_from(&y.transpose());
    pj.view_mut((n, n), (r, r)).copy_from(pr);
    pj
}

/// Controllability, observability and quadratic-output observability
/// Gramians. `o_qo` is only present for quadratic-output dynamics.
#[derive(Debug, Clone)]
pub struct GramianSet {
    pub p_ctrl: Mat,
    pub o_obs: Mat,
    pub o_qo: Option<Mat>,
}

/// Solutions of the two cross Sylvester equations between a full and a
/// reduced model:
/// `A Y + Y Ar' + B Br' = 0` and `A' Z + Z Ar + Q Y Qr / 4 = 0`.
#[derive(Debug, Clone)]
pub struct CrossGramians {
    pub y: Mat,
    pub z: Mat,
}

fn require_stable(sys_a: &Mat) -> Result<()> {
    let abscissa = crate::numkernels::spectral_abscissa(sys_a)?;
    if abscissa >= 0.0 {
        return Err(Error::Unstable(abscissa));
    }
    Ok(())
}

/// Controllability and observability Gramians of a stable LTI system.
pub fn gramians(sys: &LtiSystem) -> Result<GramianSet> {
    require_stable(&sys.a)?;
    let (p_ctrl, _) = solve_lyapunov(&sys.a, &(&sys.b * sys.b.transpose()))?;
    let (o_obs, _) = solve_lyapunov(&sys.a.transpose(), &(sys.c.transpose() * &sys.c))?;
    Ok(GramianSet { p_ctrl, o_obs, o_qo: None })
}

/// Quadratic-output observability Gramian: the solution of
/// `A' O + O A + Q P Q / 4 = 0` for a given controllability Gramian `P`.
pub fn qo_obs_gramian(sys: &LtiqoSystem, p_ctrl: &Mat) -> Result<Mat> {
    require_stable(&sys.a)?;
    let rhs = (&sys.qout * p_ctrl * &sys.qout) * 0.25;
    let (o_qo, _) = solve_lyapunov(&sys.a.transpose(), &rhs)?;
    Ok(o_qo)
}

/// H2 norm of a stable LTI system with zero feedthrough,
/// `sqrt(tr(C P C'))`.
pub fn h2_norm_lti(sys: &LtiSystem) -> Result<f64> {
    require_stable(&sys.a)?;
    let d_scale = sys.b.amax().max(sys.c.amax()).max(1.0);
    if sys.d.amax() > 1e-15 * d_scale {
        return Err(Error::NonzeroFeedthrough(sys.d.amax()));
    }
    let g = gramians(sys)?;
    let val = (&sys.c * &g.p_ctrl * sys.c.transpose()).trace();
    Ok(val.max(0.0).sqrt())
}

/// H2 norm of a stable quadratic-output system,
/// `sqrt(tr(P Q P Q) / 4)`.
///
/// The trace is accumulated as a sum of squared eigenvalues of
/// `sqrt(P) Q sqrt(P)`, which is exact for indefinite `Q` as well and
/// avoids the cancellation of the plain trace product.
pub fn h2_norm_ltiqo(sys: &LtiqoSystem) -> Result<f64> {
    require_stable(&sys.a)?;
    let (p, _) = solve_lyapunov(&sys.a, &(&sys.b * sys.b.transpose()))?;
    let f = psd_factor(&p);
    let m = symmetrize(&(f.transpose() * &sys.qout * &f));
    let (vals, _) = sym_eig(&m);
    let val = 0.25 * vals.iter().map(|l| l * l).sum::<f64>();
    Ok(val.sqrt())
}

/// Squared H2 distance between two quadratic-output systems by the
/// three-trace formula
///
/// ```text
/// dist^2 = tr(P Q P Q)/4 + tr(Pr Qr Pr Qr)/4 - tr(Y' Q Y Qr)/2
/// ```
///
/// with `Y` the cross Sylvester solution. The three solves are exactly
/// the precomputable quantities reused by the energy-matching objective;
/// the scalar combination is evaluated as a sum of squared eigenvalues of
/// `sqrt(Pj) blkdiag(Q, -Qr) sqrt(Pj)` with the joint Gramian `Pj`
/// assembled from `P`, `Pr`, `Y`, which is the same number without the
/// catastrophic cancellation of the raw trace difference when the
/// systems nearly coincide.
pub fn h2_dist_ltiqo_squared(fom: &LtiqoSystem, rom: &LtiqoSystem) -> Result<f64> {
    require_stable(&fom.a)?;
    require_stable(&rom.a)?;
    let (p, _) = solve_lyapunov(&fom.a, &(&fom.b * fom.b.transpose()))?;
    let (pr, _) = solve_lyapunov(&rom.a, &(&rom.b * rom.b.transpose()))?;
    let (y, _) = solve_sylvester(&fom.a, &rom.a.transpose(), &(&fom.b * rom.b.transpose()))?;
    let n = fom.order();
    let r = rom.order();
    let pj = joint_gramian(&p, &pr, &y);
    let mut qj = Mat::zeros(n + r, n + r);
    qj.view_mut((0, 0), (n, n)).copy_from(&fom.qout);
    qj.view_mut((n, n), (r, r)).copy_from(&(-&rom.qout));
    let f = psd_factor(&pj);
    let m = symmetrize(&(f.transpose() * qj * &f));
    let (vals, _) = sym_eig(&m);
    Ok(0.25 * vals.iter().map(|l| l * l).sum::<f64>())
}

/// H2 distance between two quadratic-output systems.
pub fn h2_dist_ltiqo(fom: &LtiqoSystem, rom: &LtiqoSystem) -> Result<f64> {
    Ok(h2_dist_ltiqo_squared(fom, rom)?.sqrt())
}

/// H2 distance between two stable LTI systems with matching feedthrough:
/// the H2 norm of the error system, computed as the Frobenius norm of
/// `[C, -Cr] sqrt(Pj)` with the joint Gramian assembled from the three
/// Lyapunov/Sylvester solutions.
pub fn h2_dist_lti(fom: &LtiSystem, rom: &LtiSystem) -> Result<f64> {
    if fom.inputs() != rom.inputs() || fom.outputs() != rom.outputs() {
        return Err(Error::DimensionMismatch("io dimensions differ".into()));
    }
    let d_diff = (&fom.d - &rom.d).amax();
    let d_scale = fom.d.amax().max(rom.d.amax()).max(1.0);
    if d_diff > 1e-14 * d_scale {
        return Err(Error::FeedthroughMismatch(d_diff));
    }
    require_stable(&fom.a)?;
    require_stable(&rom.a)?;
    let (p, _) = solve_lyapunov(&fom.a, &(&fom.b * fom.b.transpose()))?;
    let (pr, _) = solve_lyapunov(&rom.a, &(&rom.b * rom.b.transpose()))?;
    let (y, _) = solve_sylvester(&fom.a, &rom.a.transpose(), &(&fom.b * rom.b.transpose()))?;
    let pj = joint_gramian(&p, &pr, &y);
    let n = fom.order();
    let r = rom.order();
    let mut ce = Mat::zeros(fom.outputs(), n + r);
    ce.view_mut((0, 0), (fom.outputs(), n)).copy_from(&fom.c);
    ce.view_mut((0, n), (fom.outputs(), r)).copy_from(&(-&rom.c));
    let f = psd_factor(&pj);
    Ok((ce * f).norm())
}

/// Extended H2 distance: `sqrt(dist_io^2 + dist_ham^2)`, the io and
/// Hamiltonian-dynamic errors combined with equal weight.
pub fn h2_dist_extended(fom: &ExtendedPhSystem, rom: &ExtendedPhSystem) -> Result<f64> {
    let dio = h2_dist_lti(&fom.io(), &rom.io())?;
    let dham2 = h2_dist_ltiqo_squared(&fom.ham(), &rom.ham())?;
    Ok((dio * dio + dham2).sqrt())
}

/// Extended H2 norm of a single system: `sqrt(|io|^2 + |ham|^2)`.
/// Requires zero feedthrough for the io part; pass the feedthrough-free
/// difference when the system carries an artificial `eps I`.
pub fn h2_norm_extended(sys: &ExtendedPhSystem) -> Result<f64> {
    let io = sys.io();
    let nio = h2_norm_lti(&io)?;
    let nham = h2_norm_ltiqo(&sys.ham())?;
    Ok((nio * nio + nham * nham).sqrt())
}

/// Joint quadratic-output system whose norm equals the distance between
/// `fom` and `rom`: block-diagonal dynamics with output matrix
/// `blkdiag(Q, -Qr)`. Test oracle for the three-trace formula.
pub fn ltiqo_difference_system(fom: &LtiqoSystem, rom: &LtiqoSystem) -> LtiqoSystem {
    let n = fom.order();
    let r = rom.order();
    let m = fom.b.ncols();
    let mut a = Mat::zeros(n + r, n + r);
    a.view_mut((0, 0), (n, n)).copy_from(&fom.a);
    a.view_mut((n, n), (r, r)).copy_from(&rom.a);
    let mut b = Mat::zeros(n + r, m);
    b.view_mut((0, 0), (n, m)).copy_from(&fom.b);
    b.view_mut((n, 0), (r, m)).copy_from(&rom.b);
    let mut q = Mat::zeros(n + r, n + r);
    q.view_mut((0, 0), (n, n)).copy_from(&fom.qout);
    q.view_mut((n, n), (r, r)).copy_from(&(-&rom.qout));
    LtiqoSystem { a, b, qout: symmetrize(&q) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{ExtendedPhSystem, PhSystem};

    fn fom_5_1() -> ExtendedPhSystem {
        let ph = PhSystem::new(
            Mat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]),
            Mat::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]),
            Mat::identity(2, 2),
            Mat::from_column_slice(2, 1, &[6.0, 0.0]),
            Mat::zeros(2, 1),
            Mat::from_element(1, 1, 1.0),
            Mat::zeros(1, 1),
        )
        .unwrap();
        ExtendedPhSystem::new(ph)
    }

    fn fom_4_1() -> ExtendedPhSystem {
        let ph = PhSystem::new(
            Mat::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]),
            Mat::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 2.0]),
            Mat::identity(2, 2),
            Mat::from_column_slice(2, 1, &[1.0, 0.0]),
            Mat::zeros(2, 1),
            Mat::zeros(1, 1),
            Mat::zeros(1, 1),
        )
        .unwrap();
        ExtendedPhSystem::new(ph)
    }

    fn xorshift(state: &mut u64) -> f64 {
        *state ^= *state << 13;
        *state ^= *state >> 7;
        *state ^= *state << 17;
        (*state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }

    #[test]
    fn printed_controllability_gramian() {
        let g = gramians(&fom_5_1().io()).unwrap();
        let expect = Mat::from_row_slice(2, 2, &[8.0, -2.0, -2.0, 2.0]);
        assert!((g.p_ctrl - expect).norm() < 1e-12);
    }

    #[test]
    fn scalar_gramian() {
        let (a, b, c) = (1.7, 0.8, 1.3);
        let sys = LtiSystem::new(
            Mat::from_element(1, 1, -a),
            Mat::from_element(1, 1, b),
            Mat::from_element(1, 1, c),
            Mat::zeros(1, 1),
        )
        .unwrap();
        let g = gramians(&sys).unwrap();
        assert!((g.p_ctrl[(0, 0)] - b * b / (2.0 * a)).abs() < 1e-14);
        assert!((g.o_obs[(0, 0)] - c * c / (2.0 * a)).abs() < 1e-14);
    }

    #[test]
    fn gramian_unstable_error() {
        let sys = LtiSystem::new(
            Mat::from_element(1, 1, 0.5),
            Mat::from_element(1, 1, 1.0),
            Mat::from_element(1, 1, 1.0),
            Mat::zeros(1, 1),
        )
        .unwrap();
        assert!(matches!(gramians(&sys), Err(Error::Unstable(_))));
    }

    #[test]
    fn qo_gramian_scalar_chain() {
        // a=1, b=1, q=2: P = 1/2, O = q^2 P / (8a) = 1/4, norm^2 = b' O b = 1/4.
        let sys = LtiqoSystem::new(
            Mat::from_element(1, 1, -1.0),
            Mat::from_element(1, 1, 1.0),
            Mat::from_element(1, 1, 2.0),
        )
        .unwrap();
        let (p, _) = solve_lyapunov(&sys.a, &(&sys.b * sys.b.transpose())).unwrap();
        let o = qo_obs_gramian(&sys, &p).unwrap();
        assert!((o[(0, 0)] - 0.25).abs() < 1e-14);
        let norm = h2_norm_ltiqo(&sys).unwrap();
        assert!((norm - 0.5).abs() < 1e-14);
    }

    #[test]
    fn qo_gramian_zero_output() {
        let sys = LtiqoSystem::new(
            Mat::from_element(1, 1, -1.0),
            Mat::from_element(1, 1, 1.0),
            Mat::zeros(1, 1),
        )
        .unwrap();
        let (p, _) = solve_lyapunov(&sys.a, &(&sys.b * sys.b.transpose())).unwrap();
        let o = qo_obs_gramian(&sys, &p).unwrap();
        assert_eq!(o.amax(), 0.0);
        assert_eq!(h2_norm_ltiqo(&sys).unwrap(), 0.0);
    }

    #[test]
    fn h2_norm_scalar() {
        let sys = LtiSystem::new(
            Mat::from_element(1, 1, -1.0),
            Mat::from_element(1, 1, 1.0),
            Mat::from_element(1, 1, 1.0),
            Mat::zeros(1, 1),
        )
        .unwrap();
        assert!((h2_norm_lti(&sys).unwrap() - 1.0 / 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn h2_norm_rejects_feedthrough() {
        let sys = LtiSystem::new(
            Mat::from_element(1, 1, -1.0),
            Mat::from_element(1, 1, 1.0),
            Mat::from_element(1, 1, 1.0),
            Mat::from_element(1, 1, 1e-6),
        )
        .unwrap();
        assert!(matches!(h2_norm_lti(&sys), Err(Error::NonzeroFeedthrough(_))));
    }

    #[test]
    fn dual_trace_formulas_agree() {
        let mut s = 808u64;
        for _ in 0..5 {
            let raw = Mat::from_fn(8, 8, |_, _| xorshift(&mut s));
            let a = raw - Mat::identity(8, 8) * 5.0;
            let b = Mat::from_fn(8, 2, |_, _| xorshift(&mut s));
            let c = Mat::from_fn(2, 8, |_, _| xorshift(&mut s));
            let sys = LtiSystem::new(a, b, c, Mat::zeros(2, 2)).unwrap();
            let g = gramians(&sys).unwrap();
            let via_p = (&sys.c * &g.p_ctrl * sys.c.transpose()).trace();
            let via_o = (sys.b.transpose() * &g.o_obs * &sys.b).trace();
            assert!((via_p - via_o).abs() < 1e-10 * via_p.abs().max(1.0));
        }
    }

    #[test]
    fn quadratic_output_dual_formula_agrees() {
        let mut s = 909u64;
        for _ in 0..5 {
            let raw = Mat::from_fn(6, 6, |_, _| xorshift(&mut s));
            let a = raw - Mat::identity(6, 6) * 5.0;
            let b = Mat::from_fn(6, 2, |_, _| xorshift(&mut s));
            let qraw = Mat::from_fn(6, 6, |_, _| xorshift(&mut s));
            let q = symmetrize(&qraw);
            let sys = LtiqoSystem::new(a, b, q).unwrap();
            let (p, _) = solve_lyapunov(&sys.a, &(&sys.b * sys.b.transpose())).unwrap();
            let o = qo_obs_gramian(&sys, &p).unwrap();
            let via_o = (sys.b.transpose() * &o * &sys.b).trace();
            let pq = &p * &sys.qout;
            let via_trace = 0.25 * (&pq * &pq).trace();
            assert!((via_o - via_trace).abs() < 1e-10 * via_trace.abs().max(1.0));
        }
    }

    #[test]
    fn printed_hamiltonian_norm_squared_is_19() {
        let norm = h2_norm_ltiqo(&fom_5_1().ham()).unwrap();
        assert!((norm * norm - 19.0).abs() < 1e-10);
    }

    #[test]
    fn hamiltonian_distance_of_minimal_realization_is_one_sixth() {
        let fom = fom_4_1().ham();
        let rom = LtiqoSystem::new(
            Mat::from_element(1, 1, -1.0),
            Mat::from_element(1, 1, 1.0),
            Mat::from_element(1, 1, 1.0),
        )
        .unwrap();
        let d = h2_dist_ltiqo(&fom, &rom).unwrap();
        assert!((d - 1.0 / 6.0).abs() < 1e-10, "dist = {d}");
    }

    #[test]
    fn ltiqo_distance_identical_systems_is_zero() {
        let sys = fom_5_1().ham();
        assert!(h2_dist_ltiqo(&sys, &sys).unwrap() < 1e-12);
    }

    #[test]
    fn ltiqo_distance_matches_block_augmentation_oracle() {
        let mut s = 4711u64;
        for _ in 0..5 {
            let a = Mat::from_fn(5, 5, |_, _| xorshift(&mut s)) - Mat::identity(5, 5) * 4.0;
            let b = Mat::from_fn(5, 2, |_, _| xorshift(&mut s));
            let q = symmetrize(&Mat::from_fn(5, 5, |_, _| xorshift(&mut s)));
            let fom = LtiqoSystem::new(a, b, q).unwrap();
            let ar = Mat::from_fn(2, 2, |_, _| xorshift(&mut s)) - Mat::identity(2, 2) * 4.0;
            let br = Mat::from_fn(2, 2, |_, _| xorshift(&mut s));
            let qr = symmetrize(&Mat::from_fn(2, 2, |_, _| xorshift(&mut s)));
            let rom = LtiqoSystem::new(ar, br, qr).unwrap();
            let direct = h2_dist_ltiqo(&fom, &rom).unwrap();
            let joint = ltiqo_difference_system(&fom, &rom);
            let oracle = h2_norm_ltiqo(&joint).unwrap();
            assert!((direct - oracle).abs() < 1e-10 * oracle.max(1.0));
        }
    }

    #[test]
    fn ltiqo_distance_symmetry() {
        let mut s = 1234u64;
        let a = Mat::from_fn(4, 4, |_, _| xorshift(&mut s)) - Mat::identity(4, 4) * 4.0;
        let b = Mat::from_fn(4, 1, |_, _| xorshift(&mut s));
        let q = symmetrize(&Mat::from_fn(4, 4, |_, _| xorshift(&mut s)));
        let s1 = LtiqoSystem::new(a, b, q).unwrap();
        let a2 = Mat::from_fn(3, 3, |_, _| xorshift(&mut s)) - Mat::identity(3, 3) * 4.0;
        let b2 = Mat::from_fn(3, 1, |_, _| xorshift(&mut s));
        let q2 = symmetrize(&Mat::from_fn(3, 3, |_, _| xorshift(&mut s)));
        let s2 = LtiqoSystem::new(a2, b2, q2).unwrap();
        let d12 = h2_dist_ltiqo(&s1, &s2).unwrap();
        let d21 = h2_dist_ltiqo(&s2, &s1).unwrap();
        assert!((d12 - d21).abs() < 1e-10 * d12.max(1.0));
    }

    #[test]
    fn lti_distance_scalar_closed_form() {
        // (-1, 1, 1) vs (-2, 1, 1): dist^2 = 1/2 + 1/4 - 2/3 = 1/12.
        let s1 = LtiSystem::new(
            Mat::from_element(1, 1, -1.0),
            Mat::from_element(1, 1, 1.0),
            Mat::from_element(1, 1, 1.0),
            Mat::zeros(1, 1),
        )
        .unwrap();
        let s2 = LtiSystem::new(
            Mat::from_element(1, 1, -2.0),
            Mat::from_element(1, 1, 1.0),
            Mat::from_element(1, 1, 1.0),
            Mat::zeros(1, 1),
        )
        .unwrap();
        let d = h2_dist_lti(&s1, &s2).unwrap();
        assert!((d - (1.0f64 / 12.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn lti_distance_to_minimal_realization_is_zero() {
        let fom = fom_4_1().io();
        let rom = LtiSystem::new(
            Mat::from_element(1, 1, -1.0),
            Mat::from_element(1, 1, 1.0),
            Mat::from_element(1, 1, 1.0),
            Mat::zeros(1, 1),
        )
        .unwrap();
        assert!(h2_dist_lti(&fom, &rom).unwrap() < 1e-10);
    }

    #[test]
    fn lti_distance_feedthrough_mismatch() {
        let s1 = LtiSystem::new(
            Mat::from_element(1, 1, -1.0),
            Mat::from_element(1, 1, 1.0),
            Mat::from_element(1, 1, 1.0),
            Mat::from_element(1, 1, 1e-6),
        )
        .unwrap();
        let s2 = LtiSystem::new(
            Mat::from_element(1, 1, -2.0),
            Mat::from_element(1, 1, 1.0),
            Mat::from_element(1, 1, 1.0),
            Mat::zeros(1, 1),
        )
        .unwrap();
        assert!(matches!(h2_dist_lti(&s1, &s2), Err(Error::FeedthroughMismatch(_))));
    }

    #[test]
    fn extended_distance_of_ex41_pair_is_one_sixth() {
        // The io distance vanishes and the Hamiltonian part contributes 1/6.
        let fom = fom_4_1();
        let rom_lti = LtiSystem::new(
            Mat::from_element(1, 1, -1.0),
            Mat::from_element(1, 1, 1.0),
            Mat::from_element(1, 1, 1.0),
            Mat::zeros(1, 1),
        )
        .unwrap();
        let rom_ph = crate::systems::lti_to_ph(&rom_lti, &Mat::from_element(1, 1, 1.0), 1e-6)
            .unwrap();
        let rom = ExtendedPhSystem::new(rom_ph);
        let d = h2_dist_extended(&fom, &rom).unwrap();
        assert!((d - 1.0 / 6.0).abs() < 1e-10, "dist = {d}");
    }

    #[test]
    fn h2_invariant_under_similarity() {
        let mut s = 2718u64;
        let a = Mat::from_fn(5, 5, |_, _| xorshift(&mut s)) - Mat::identity(5, 5) * 4.0;
        let b = Mat::from_fn(5, 2, |_, _| xorshift(&mut s));
        let c = Mat::from_fn(1, 5, |_, _| xorshift(&mut s));
        let sys = LtiSystem::new(a.clone(), b.clone(), c.clone(), Mat::zeros(1, 2)).unwrap();
        let raw = Mat::from_fn(5, 5, |_, _| xorshift(&mut s));
        let t = &raw * raw.transpose() + Mat::identity(5, 5) * 2.0;
        let tinv = t.clone().try_inverse().unwrap();
        let sim = LtiSystem::new(&tinv * &a * &t, &tinv * &b, &c * &t, Mat::zeros(1, 2)).unwrap();
        let n1 = h2_norm_lti(&sys).unwrap();
        let n2 = h2_norm_lti(&sim).unwrap();
        assert!((n1 - n2).abs() < 1e-10 * n1.max(1.0));
    }
}
