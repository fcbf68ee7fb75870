//! System types: standard LTI, port-Hamiltonian, quadratic-output and the
//! extended pH view, together with validation, factorization and time
//! stepping.
//!
//! A port-Hamiltonian system is the septuple `(J, R, Q, G, P, S, N)` with
//!
//! ```text
//! x' = (J - R) Q x + (G - P) u,      y = (G + P)' Q x + (S - N) u,
//! ```
//!
//! Hamiltonian `H(x) = x' Q x / 2`, skew-symmetric structure matrix
//! `Gamma = [[J, G], [-G', N]]`, positive semidefinite dissipation matrix
//! `W = [[R, P], [P', S]]` and positive semidefinite `Q`. The same
//! state-space map admits many factorizations: any positive definite
//! solution `X` of the KYP inequality induces one, and swapping `X` does
//! not change the input-output behavior.

use crate::numkernels::{min_sym_eigenvalue, skew_part, symmetrize};
use crate::{CMat, Error, Mat, Result, Vector};
use nalgebra::Complex;

/// Standard state-space quadruple `(A, B, C, D)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LtiSystem {
    pub a: Mat,
    pub b: Mat,
    pub c: Mat,
    pub d: Mat,
}

impl LtiSystem {
    pub fn new(a: Mat, b: Mat, c: Mat, d: Mat) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch("A must be square".into()));
        }
        let m = b.ncols();
        let p = c.nrows();
        if b.nrows() != n || c.ncols() != n || d.nrows() != p || d.ncols() != m {
            return Err(Error::DimensionMismatch(format!(
                "inconsistent system dimensions: A {}x{}, B {}x{}, C {}x{}, D {}x{}",
                n,
                n,
                b.nrows(),
                b.ncols(),
                c.nrows(),
                c.ncols(),
                d.nrows(),
                d.ncols()
            )));
        }
        for (name, mat) in [("A", &a), ("B", &b), ("C", &c), ("D", &d)] {
            if mat.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(name.into()));
            }
        }
        Ok(Self { a, b, c, d })
    }

    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.c.nrows()
    }

    /// Largest real part over the eigenvalues of `A`.
    pub fn spectral_abscissa(&self) -> Result<f64> {
        crate::numkernels::spectral_abscissa(&self.a)
    }

    pub fn is_stable(&self) -> Result<bool> {
        Ok(self.spectral_abscissa()? < 0.0)
    }

    /// Returns a copy with `eps * I` added to the feedthrough.
    pub fn with_feedthrough_shift(&self, eps: f64) -> Self {
        let m = self.d.nrows().min(self.d.ncols());
        let mut d = self.d.clone();
        for i in 0..m {
            d[(i, i)] += eps;
        }
        Self { a: self.a.clone(), b: self.b.clone(), c: self.c.clone(), d }
    }
}

/// Port-Hamiltonian septuple.
#[derive(Debug, Clone, PartialEq)]
pub struct PhSystem {
    pub j: Mat,
    pub r: Mat,
    pub q: Mat,
    pub g: Mat,
    pub p: Mat,
    pub s: Mat,
    pub n: Mat,
}

impl PhSystem {
    pub fn new(j: Mat, r: Mat, q: Mat, g: Mat, p: Mat, s: Mat, n: Mat) -> Result<Self> {
        let nn = j.nrows();
        let m = g.ncols();
        for (name, mat) in [("J", &j), ("R", &r), ("Q", &q)] {
            if mat.nrows() != nn || mat.ncols() != nn {
                return Err(Error::DimensionMismatch(format!("{name} must be {nn}x{nn}")));
            }
        }
        for (name, mat) in [("G", &g), ("P", &p)] {
            if mat.nrows() != nn || mat.ncols() != m {
                return Err(Error::DimensionMismatch(format!("{name} must be {nn}x{m}")));
            }
        }
        for (name, mat) in [("S", &s), ("N", &n)] {
            if mat.nrows() != m || mat.ncols() != m {
                return Err(Error::DimensionMismatch(format!("{name} must be {m}x{m}")));
            }
        }
        for (name, mat) in
            [("J", &j), ("R", &r), ("Q", &q), ("G", &g), ("P", &p), ("S", &s), ("N", &n)]
        {
            if mat.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(name.into()));
            }
        }
        Ok(Self { j, r, q, g, p, s, n })
    }

    pub fn order(&self) -> usize {
        self.j.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.g.ncols()
    }

    /// Structure matrix `Gamma = [[J, G], [-G', N]]`.
    pub fn structure_matrix(&self) -> Mat {
        let n = self.order();
        let m = self.inputs();
        let mut gamma = Mat::zeros(n + m, n + m);
        gamma.view_mut((0, 0), (n, n)).copy_from(&self.j);
        gamma.view_mut((0, n), (n, m)).copy_from(&self.g);
        gamma.view_mut((n, 0), (m, n)).copy_from(&(-self.g.transpose()));
        gamma.view_mut((n, n), (m, m)).copy_from(&self.n);
        gamma
    }

    /// Dissipation matrix `W = [[R, P], [P', S]]`.
    pub fn dissipation_matrix(&self) -> Mat {
        let n = self.order();
        let m = self.inputs();
        let mut w = Mat::zeros(n + m, n + m);
        w.view_mut((0, 0), (n, n)).copy_from(&self.r);
        w.view_mut((0, n), (n, m)).copy_from(&self.p);
        w.view_mut((n, 0), (m, n)).copy_from(&self.p.transpose());
        w.view_mut((n, n), (m, m)).copy_from(&self.s);
        w
    }

    /// Hamiltonian `H(x) = x' Q x / 2`.
    pub fn hamiltonian(&self, x: &Vector) -> f64 {
        0.5 * (x.transpose() * &self.q * x)[(0, 0)]
    }
}

/// Linear dynamics with a single quadratic output `y = x' Qout x / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct LtiqoSystem {
    pub a: Mat,
    pub b: Mat,
    pub qout: Mat,
}

impl LtiqoSystem {
    pub fn new(a: Mat, b: Mat, qout: Mat) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n || b.nrows() != n || qout.nrows() != n || qout.ncols() != n {
            return Err(Error::DimensionMismatch("LTIQO dimensions inconsistent".into()));
        }
        if (qout.clone() - qout.transpose()).amax() > 1e-10 * qout.amax().max(1.0) {
            return Err(Error::InvalidArgument(
                "quadratic output matrix must be symmetric".into(),
            ));
        }
        Ok(Self { a, b, qout: symmetrize(&qout) })
    }

    pub fn order(&self) -> usize {
        self.a.nrows()
    }
}

/// A pH system viewed jointly through its input-output map and its
/// Hamiltonian dynamic.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedPhSystem {
    pub ph: PhSystem,
}

impl ExtendedPhSystem {
    pub fn new(ph: PhSystem) -> Self {
        Self { ph }
    }

    pub fn order(&self) -> usize {
        self.ph.order()
    }

    pub fn inputs(&self) -> usize {
        self.ph.inputs()
    }

    /// Input-output view `(A, B, C, D)`.
    pub fn io(&self) -> LtiSystem {
        ph_to_lti(&self.ph)
    }

    /// Hamiltonian dynamic `(A, B, Q)` with output `x' Q x / 2`.
    pub fn ham(&self) -> LtiqoSystem {
        let io = self.io();
        LtiqoSystem { a: io.a, b: io.b, qout: symmetrize(&self.ph.q) }
    }

    /// Adds `eps * I` to the symmetric feedthrough part `S`, which keeps
    /// the septuple a valid pH system and shifts `D` by `eps * I`.
    pub fn with_feedthrough_shift(&self, eps: f64) -> Self {
        let mut ph = self.ph.clone();
        let m = ph.inputs();
        for i in 0..m {
            ph.s[(i, i)] += eps;
        }
        Self { ph }
    }
}

/// A single violated pH-structure condition with its magnitude.
#[derive(Debug, Clone)]
pub struct Violation {
    pub what: String,
    pub magnitude: f64,
}

/// Outcome of [`validate_ph`]; empty iff all three defining conditions
/// hold within tolerance.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub tol_used: f64,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.violations.is_empty() {
            write!(f, "valid pH system (tol {:.3e})", self.tol_used)
        } else {
            writeln!(f, "{} violation(s) at tol {:.3e}:", self.violations.len(), self.tol_used)?;
            for v in &self.violations {
                writeln!(f, "  - {} (magnitude {:.6e})", v.what, v.magnitude)?;
            }
            Ok(())
        }
    }
}

/// Default validation tolerance: `1e-8` times the overall matrix scale.
/// Imported benchmark data carries discretization noise, so exact checks
/// are too strict.
pub fn default_validation_tol(ph: &PhSystem) -> f64 {
    let scale = ph
        .structure_matrix()
        .amax()
        .max(ph.dissipation_matrix().amax())
        .max(ph.q.amax())
        .max(1.0);
    1e-8 * scale
}

/// Checks the three conditions of the pH definition: skew-symmetric
/// structure matrix, positive semidefinite dissipation matrix, positive
/// semidefinite `Q`.
pub fn validate_ph(ph: &PhSystem, tol: f64) -> ValidationReport {
    let mut report = ValidationReport { violations: Vec::new(), tol_used: tol };
    let gamma = ph.structure_matrix();
    let skew_defect = (&gamma + gamma.transpose()).amax();
    if skew_defect > tol {
        report.violations.push(Violation {
            what: "structure matrix not skew-symmetric".into(),
            magnitude: skew_defect,
        });
    }
    let w = ph.dissipation_matrix();
    let w_asym = (&w - w.transpose()).amax();
    if w_asym > tol {
        report.violations.push(Violation {
            what: "dissipation matrix not symmetric".into(),
            magnitude: w_asym,
        });
    }
    let w_min = min_sym_eigenvalue(&w);
    if w_min < -tol {
        report.violations.push(Violation {
            what: "dissipation matrix not positive semidefinite".into(),
            magnitude: -w_min,
        });
    }
    let q_asym = (&ph.q - ph.q.transpose()).amax();
    if q_asym > tol {
        report.violations.push(Violation { what: "Q not symmetric".into(), magnitude: q_asym });
    }
    let q_min = min_sym_eigenvalue(&ph.q);
    if q_min < -tol {
        report.violations.push(Violation {
            what: "Q not positive semidefinite".into(),
            magnitude: -q_min,
        });
    }
    report
}

/// Expands a pH septuple into its state-space quadruple:
/// `A = (J-R)Q`, `B = G-P`, `C = (G+P)'Q`, `D = S-N`.
pub fn ph_to_lti(ph: &PhSystem) -> LtiSystem {
    LtiSystem {
        a: (&ph.j - &ph.r) * &ph.q,
        b: &ph.g - &ph.p,
        c: (&ph.g + &ph.p).transpose() * &ph.q,
        d: &ph.s - &ph.n,
    }
}

/// Factorizes a state-space quadruple into pH form using a positive
/// definite KYP solution `X`:
///
/// ```text
/// Q = X, J = Skew(A X^{-1}), R = -Sym(A X^{-1}),
/// G = (X^{-1}C' + B)/2, P = (X^{-1}C' - B)/2, S = Sym(D), N = Skew(D).
/// ```
///
/// The factorization does not change the state-space map. `X` must be
/// feasible for the KYP inequality of `sys` within `feas_tol`. Inverses
/// of `X` are applied through its Cholesky factor, never formed.
pub fn lti_to_ph(sys: &LtiSystem, x: &Mat, feas_tol: f64) -> Result<PhSystem> {
    let n = sys.order();
    if x.nrows() != n || x.ncols() != n {
        return Err(Error::DimensionMismatch("X must match the state dimension".into()));
    }
    let w = crate::kyp::kyp_matrix(sys, x);
    let w_min = min_sym_eigenvalue(&w);
    if w_min < -feas_tol {
        return Err(Error::NotFeasible(w_min));
    }
    let xs = symmetrize(x);
    let chol = xs
        .clone()
        .cholesky()
        .ok_or_else(|| Error::NotPositiveDefinite("X".into()))?;
    // A X^{-1} = (X^{-1} A')' via triangular solves, with iterative
    // refinement: a plain solve leaves a residual amplified by the
    // condition number of X, which would bleed into the reassembled
    // (J-R)Q and break the exactness of the factorization round trip.
    let refined_solve = |rhs: &Mat| -> Mat {
        let mut sol = chol.solve(rhs);
        for _ in 0..2 {
            let res = rhs - &xs * &sol;
            if res.norm() == 0.0 {
                break;
            }
            sol += chol.solve(&res);
        }
        sol
    };
    let ax_inv = refined_solve(&sys.a.transpose()).transpose();
    let xinv_ct = refined_solve(&sys.c.transpose());
    Ok(PhSystem {
        j: skew_part(&ax_inv),
        r: -symmetrize(&ax_inv),
        q: xs,
        g: (&xinv_ct + &sys.b) * 0.5,
        p: (&xinv_ct - &sys.b) * 0.5,
        s: symmetrize(&sys.d),
        n: skew_part(&sys.d),
    })
}

/// Transfer function `H(s) = C (sI - A)^{-1} B + D` at a complex point.
pub fn evaluate_transfer(sys: &LtiSystem, s: Complex<f64>) -> Result<CMat> {
    let n = sys.order();
    let shifted = CMat::from_fn(n, n, |i, j| {
        let diag = if i == j { s } else { Complex::new(0.0, 0.0) };
        diag - Complex::new(sys.a[(i, j)], 0.0)
    });
    let bc = CMat::from_fn(n, sys.inputs(), |i, j| Complex::new(sys.b[(i, j)], 0.0));
    let lu = shifted.lu();
    let solved = lu.solve(&bc).ok_or(Error::SingularShift)?;
    if solved.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::SingularShift);
    }
    let cc = CMat::from_fn(sys.outputs(), n, |i, j| Complex::new(sys.c[(i, j)], 0.0));
    let dc =
        CMat::from_fn(sys.outputs(), sys.inputs(), |i, j| Complex::new(sys.d[(i, j)], 0.0));
    Ok(&cc * solved + dc)
}

/// Trajectories produced by [`simulate`].
#[derive(Debug, Clone)]
pub struct Trajectories {
    /// Sample times, `t[k] = k * dt`.
    pub t: Vec<f64>,
    /// Linear output, one column per sample.
    pub y: Mat,
    /// Hamiltonian output per sample.
    pub y_h: Vector,
    /// Final state.
    pub x_final: Vector,
}

/// Implicit-midpoint time stepping of the extended system.
///
/// `u` holds input samples on the uniform grid `0, dt, 2 dt, ...`, one
/// column per sample; the trajectory has `u.ncols()` samples. Signals are
/// piecewise linear between samples, so the midpoint input is the average
/// of consecutive samples. The step matrix `I - dt/2 A` is factored once.
/// The midpoint rule conserves quadratic invariants of lossless flows, so
/// `y_h` drifts only at roundoff level when `R`, `P`, `S` vanish and the
/// input is zero.
pub fn simulate(sys: &ExtendedPhSystem, u: &Mat, x0: &Vector, dt: f64) -> Result<Trajectories> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidArgument("dt must be positive".into()));
    }
    if u.ncols() == 0 {
        return Err(Error::InvalidArgument("input signal needs at least one sample".into()));
    }
    let io = sys.io();
    let n = io.order();
    let m = io.inputs();
    let p = io.outputs();
    if u.nrows() != m {
        return Err(Error::DimensionMismatch(format!(
            "input has {} rows, system has {} inputs",
            u.nrows(),
            m
        )));
    }
    if x0.len() != n {
        return Err(Error::DimensionMismatch("x0 length mismatch".into()));
    }
    let steps = u.ncols() - 1;
    let lhs = Mat::identity(n, n) - &io.a * (dt / 2.0);
    let lu = lhs.lu();
    if !lu.is_invertible() {
        return Err(Error::StepFactorizationFailed);
    }
    let q = symmetrize(&sys.ph.q);

    let mut x = x0.clone();
    let mut y = Mat::zeros(p, steps + 1);
    let mut y_h = Vector::zeros(steps + 1);
    let mut t = Vec::with_capacity(steps + 1);
    let record = |k: usize, x: &Vector, y: &mut Mat, y_h: &mut Vector| {
        let yk = &io.c * x + &io.d * u.column(k);
        y.set_column(k, &yk);
        y_h[k] = 0.5 * (x.transpose() * &q * x)[(0, 0)];
    };
    record(0, &x, &mut y, &mut y_h);
    t.push(0.0);
    for k in 0..steps {
        let u_mid = (u.column(k) + u.column(k + 1)) * 0.5;
        let rhs = &x + (&io.a * &x) * (dt * 0.5) + (&io.b * u_mid) * dt;
        x = lu.solve(&rhs).ok_or(Error::StepFactorizationFailed)?;
        record(k + 1, &x, &mut y, &mut y_h);
        t.push((k + 1) as f64 * dt);
    }
    Ok(Trajectories { t, y, y_h, x_final: x })
}

/// `i * omega` samples at `count` logarithmically spaced frequencies in
/// `[w_lo, w_hi]`.
pub fn log_frequency_grid(w_lo: f64, w_hi: f64, count: usize) -> Vec<Complex<f64>> {
    assert!(w_lo > 0.0 && w_hi > w_lo && count >= 2);
    let l0 = w_lo.ln();
    let l1 = w_hi.ln();
    (0..count)
        .map(|k| {
            let w = (l0 + (l1 - l0) * k as f64 / (count - 1) as f64).exp();
            Complex::new(0.0, w)
        })
        .collect()
}

/// Evaluates the transfer function on a frequency grid.
pub fn transfer_samples(sys: &LtiSystem, grid: &[Complex<f64>]) -> Result<Vec<CMat>> {
    grid.iter().map(|&s| evaluate_transfer(sys, s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn toy_ph_example_4_1() -> ExtendedPhSystem {
        let j = Mat::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let r = Mat::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 2.0]);
        let q = Mat::identity(2, 2);
        let g = Mat::from_column_slice(2, 1, &[1.0, 0.0]);
        let p = Mat::zeros(2, 1);
        let s = Mat::zeros(1, 1);
        let n = Mat::zeros(1, 1);
        ExtendedPhSystem::new(PhSystem::new(j, r, q, g, p, s, n).unwrap())
    }

    fn toy_ph_example_5_1() -> ExtendedPhSystem {
        let j = Mat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let r = Mat::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        let q = Mat::identity(2, 2);
        let g = Mat::from_column_slice(2, 1, &[6.0, 0.0]);
        let p = Mat::zeros(2, 1);
        let s = Mat::from_element(1, 1, 1.0);
        let n = Mat::zeros(1, 1);
        ExtendedPhSystem::new(PhSystem::new(j, r, q, g, p, s, n).unwrap())
    }

    #[test]
    fn validate_accepts_printed_example() {
        let sys = toy_ph_example_4_1();
        let tol = default_validation_tol(&sys.ph);
        assert!(validate_ph(&sys.ph, tol).is_valid());
    }

    #[test]
    fn validate_flags_non_skew_structure() {
        let mut sys = toy_ph_example_4_1();
        sys.ph.j = Mat::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let rep = validate_ph(&sys.ph, 1e-8);
        assert!(!rep.is_valid());
        assert!(rep.violations.iter().any(|v| v.what.contains("skew")));
    }

    #[test]
    fn validate_reports_indefinite_dissipation_magnitude() {
        let mut sys = toy_ph_example_4_1();
        sys.ph.r = Mat::from_row_slice(2, 2, &[-0.1, 0.0, 0.0, 1.0]);
        let rep = validate_ph(&sys.ph, 1e-8);
        let v = rep
            .violations
            .iter()
            .find(|v| v.what.contains("dissipation matrix not positive"))
            .expect("violation expected");
        assert!((v.magnitude - 0.1).abs() < 1e-12);
    }

    #[test]
    fn ph_to_lti_printed_matrices() {
        let io41 = toy_ph_example_4_1().io();
        assert!((io41.a - Mat::from_row_slice(2, 2, &[-1.0, 0.0, 2.0, -2.0])).norm() < 1e-14);
        assert!((io41.b - Mat::from_column_slice(2, 1, &[1.0, 0.0])).norm() < 1e-14);
        assert!((io41.c - Mat::from_row_slice(1, 2, &[1.0, 0.0])).norm() < 1e-14);
        let io51 = toy_ph_example_5_1().io();
        assert!((io51.a - Mat::from_row_slice(2, 2, &[-2.0, 1.0, -1.0, -1.0])).norm() < 1e-14);
        assert!((io51.b - Mat::from_column_slice(2, 1, &[6.0, 0.0])).norm() < 1e-14);
    }

    #[test]
    fn ph_to_lti_zero_system() {
        let z2 = Mat::zeros(2, 2);
        let z21 = Mat::zeros(2, 1);
        let z1 = Mat::zeros(1, 1);
        let ph =
            PhSystem::new(z2.clone(), z2.clone(), z2, z21.clone(), z21, z1.clone(), z1).unwrap();
        let io = ph_to_lti(&ph);
        assert_eq!(io.a.amax(), 0.0);
        assert_eq!(io.d.amax(), 0.0);
    }

    #[test]
    fn lti_to_ph_symmetric_dissipative_case() {
        // A symmetric negative definite, C = B', D = 0, X = I:
        // J = 0, R = -A, P = 0.
        let a = Mat::from_row_slice(2, 2, &[-2.0, 0.5, 0.5, -3.0]);
        let b = Mat::from_column_slice(2, 1, &[1.0, -1.0]);
        let sys = LtiSystem::new(a.clone(), b.clone(), b.transpose(), Mat::zeros(1, 1)).unwrap();
        let ph = lti_to_ph(&sys, &Mat::identity(2, 2), 1e-8).unwrap();
        assert!(ph.j.amax() < 1e-14);
        assert!((ph.r.clone() + a).amax() < 1e-14);
        assert!(ph.p.amax() < 1e-14);
    }

    #[test]
    fn lti_to_ph_round_trip_scalar_printed_value() {
        // The order-1 surrogate of the energy-matching toy model with the
        // optimal Hamiltonian 160/169 stays in the feasible set.
        let sys = LtiSystem::new(
            Mat::from_element(1, 1, -2.0),
            Mat::from_element(1, 1, 6.0),
            Mat::from_element(1, 1, 6.0),
            Mat::from_element(1, 1, 1.0),
        )
        .unwrap();
        let x = Mat::from_element(1, 1, 160.0 / 169.0);
        let ph = lti_to_ph(&sys, &x, 1e-8).unwrap();
        assert!((ph.q[(0, 0)] - 160.0 / 169.0).abs() < 1e-14);
        let back = ph_to_lti(&ph);
        assert!((back.a - sys.a).norm() < 1e-12);
        assert!((back.b - sys.b).norm() < 1e-12);
        assert!((back.c - sys.c).norm() < 1e-12);
        assert!((back.d - sys.d).norm() < 1e-12);
    }

    #[test]
    fn lti_to_ph_rejects_infeasible_x() {
        let sys = LtiSystem::new(
            Mat::from_element(1, 1, -2.0),
            Mat::from_element(1, 1, 6.0),
            Mat::from_element(1, 1, 6.0),
            Mat::from_element(1, 1, 1.0),
        )
        .unwrap();
        // Q = 3 lies outside the feasible interval.
        let x = Mat::from_element(1, 1, 3.0);
        assert!(matches!(lti_to_ph(&sys, &x, 1e-8), Err(Error::NotFeasible(_))));
    }

    #[test]
    fn transfer_scalar_at_zero() {
        let sys = LtiSystem::new(
            Mat::from_element(1, 1, -1.0),
            Mat::from_element(1, 1, 1.0),
            Mat::from_element(1, 1, 1.0),
            Mat::from_element(1, 1, 0.0),
        )
        .unwrap();
        let h = evaluate_transfer(&sys, Complex::new(0.0, 0.0)).unwrap();
        assert!((h[(0, 0)].re - 1.0).abs() < 1e-14);
        assert!(h[(0, 0)].im.abs() < 1e-14);
    }

    #[test]
    fn transfer_of_minimal_realization_matches_at_i() {
        let fom = toy_ph_example_4_1().io();
        let rom = LtiSystem::new(
            Mat::from_element(1, 1, -1.0),
            Mat::from_element(1, 1, 1.0),
            Mat::from_element(1, 1, 1.0),
            Mat::from_element(1, 1, 0.0),
        )
        .unwrap();
        let s = Complex::new(0.0, 1.0);
        let hf = evaluate_transfer(&fom, s).unwrap();
        let hr = evaluate_transfer(&rom, s).unwrap();
        assert!((hf[(0, 0)] - hr[(0, 0)]).norm() < 1e-14);
    }

    #[test]
    fn transfer_matches_eigendecomposition_oracle() {
        let mut state = 0xfeedu64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        let a = Mat::from_fn(5, 5, |_, _| next());
        let b = Mat::from_fn(5, 2, |_, _| next());
        let c = Mat::from_fn(2, 5, |_, _| next());
        let d = Mat::from_fn(2, 2, |_, _| next());
        let sys = LtiSystem::new(a.clone(), b.clone(), c.clone(), d.clone()).unwrap();
        let s = Complex::new(0.3, 1.7);
        let h = evaluate_transfer(&sys, s).unwrap();

        // Oracle: H(s) = C V diag(1/(s - lambda_i)) V^{-1} B + D
        let eig = crate::numkernels::complex_eig(&a).unwrap();
        let v = &eig.vectors;
        let diag = CMat::from_fn(5, 5, |i, j| {
            if i == j {
                Complex::new(1.0, 0.0) / (s - eig.values[i])
            } else {
                Complex::new(0.0, 0.0)
            }
        });
        let bc = CMat::from_fn(5, 2, |i, j| Complex::new(b[(i, j)], 0.0));
        let cc = CMat::from_fn(2, 5, |i, j| Complex::new(c[(i, j)], 0.0));
        let dc = CMat::from_fn(2, 2, |i, j| Complex::new(d[(i, j)], 0.0));
        let vinvb = v.clone().lu().solve(&bc).unwrap();
        let oracle = &cc * v * diag * vinvb + dc;
        assert!((h - oracle).norm() < 1e-10);
    }

    #[test]
    fn simulate_zero_input_zero_state() {
        let sys = toy_ph_example_4_1();
        let u = Mat::zeros(1, 50);
        let x0 = Vector::zeros(2);
        let traj = simulate(&sys, &u, &x0, 0.01).unwrap();
        assert!(traj.y.amax() < 1e-15);
        assert!(traj.y_h.amax() < 1e-15);
    }

    #[test]
    fn simulate_scalar_steady_state() {
        // x' = -a x + b u with constant u: x* = b u / a, y_h* = q (b u / a)^2 / 2.
        let (a, b, q, uval) = (1.5, 2.0, 0.7, 0.5);
        let ph = PhSystem::new(
            Mat::zeros(1, 1),
            Mat::from_element(1, 1, a / q),
            Mat::from_element(1, 1, q),
            Mat::from_element(1, 1, b),
            Mat::zeros(1, 1),
            Mat::zeros(1, 1),
            Mat::zeros(1, 1),
        )
        .unwrap();
        let sys = ExtendedPhSystem::new(ph);
        let steps = 4000;
        let u = Mat::from_element(1, steps + 1, uval);
        let traj = simulate(&sys, &u, &Vector::zeros(1), 0.01).unwrap();
        let expect = 0.5 * q * (b * uval / a).powi(2);
        assert!((traj.y_h[steps] - expect).abs() < 1e-6 * expect);
    }

    #[test]
    fn simulate_lossless_conserves_hamiltonian() {
        // J-only rotation with Q = diag(1, 4): midpoint keeps x'Qx constant.
        let ph = PhSystem::new(
            Mat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]),
            Mat::zeros(2, 2),
            Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 4.0]),
            Mat::from_column_slice(2, 1, &[1.0, 0.0]),
            Mat::zeros(2, 1),
            Mat::zeros(1, 1),
            Mat::zeros(1, 1),
        )
        .unwrap();
        let sys = ExtendedPhSystem::new(ph);
        let steps = 2000;
        let u = Mat::zeros(1, steps + 1);
        let x0 = Vector::from_column_slice(&[1.0, -0.5]);
        let traj = simulate(&sys, &u, &x0, 0.05).unwrap();
        let h0 = traj.y_h[0];
        for k in 0..=steps {
            assert!((traj.y_h[k] - h0).abs() < 1e-10 * h0);
        }
    }

    #[test]
    fn reduced_model_matches_output_but_not_hamiltonian() {
        // Constant input drive: the io-minimal order-1 model reproduces
        // y but its Hamiltonian trajectory differs from the full model.
        let fom = toy_ph_example_4_1();
        let rom = ExtendedPhSystem::new(
            lti_to_ph(
                &LtiSystem::new(
                    Mat::from_element(1, 1, -1.0),
                    Mat::from_element(1, 1, 1.0),
                    Mat::from_element(1, 1, 1.0),
                    Mat::zeros(1, 1),
                )
                .unwrap(),
                &Mat::from_element(1, 1, 1.0),
                1e-6,
            )
            .unwrap(),
        );
        let steps = 800;
        let u = Mat::from_element(1, steps + 1, 1.0);
        let tf = simulate(&fom, &u, &Vector::zeros(2), 0.01).unwrap();
        let tr = simulate(&rom, &u, &Vector::zeros(1), 0.01).unwrap();
        let y_gap = (0..=steps)
            .map(|k| (tf.y[(0, k)] - tr.y[(0, k)]).abs())
            .fold(0.0f64, f64::max);
        assert!(y_gap < 1e-9, "outputs must agree, gap {y_gap}");
        let yh_gap = (0..=steps)
            .map(|k| (tf.y_h[k] - tr.y_h[k]).abs())
            .fold(0.0f64, f64::max);
        assert!(yh_gap > 0.1, "Hamiltonians must differ, gap {yh_gap}");
    }

    #[test]
    fn validation_invariant_under_state_permutation() {
        let sys = toy_ph_example_5_1();
        let perm = Mat::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let ph = &sys.ph;
        let permuted = PhSystem::new(
            perm.transpose() * &ph.j * &perm,
            perm.transpose() * &ph.r * &perm,
            perm.transpose() * &ph.q * &perm,
            perm.transpose() * &ph.g,
            perm.transpose() * &ph.p,
            ph.s.clone(),
            ph.n.clone(),
        )
        .unwrap();
        assert!(validate_ph(&permuted, 1e-10).is_valid());
    }
}
