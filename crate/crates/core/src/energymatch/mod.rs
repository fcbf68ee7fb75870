//! Energy matching: re-selecting the reduced Hamiltonian inside the KYP
//! feasible set.
//!
//! A reduced model `(Ahat, Bhat, Chat, Dhat)` admits a pH factorization
//! for every positive definite KYP solution `Qhat`, and swapping `Qhat`
//! never changes the input-output map. Energy matching minimizes the
//! Hamiltonian-dynamic H2 error
//!
//! ```text
//! J(Qhat) = tr(PQPQ)/4 + tr(Pr Qhat Pr Qhat)/4 - tr(Y'QY Qhat)/2
//! ```
//!
//! over that feasible set. `P`, `Pr` and `Y` are fixed Lyapunov/Sylvester
//! solutions, so the objective is a strictly convex quadratic in `Qhat`
//! and the constrained problem has a unique solution. The semidefinite
//! constraint is enforced by a log-det barrier with a decreasing weight
//! schedule; each stage is minimized by BFGS over the half-vectorized
//! variable, warm-started from the previous stage.

mod bfgs;
mod sdp;
mod vech;

pub use sdp::write_sdp_export;
pub use vech::{duplication_matrix, pullback_gradient, vech, vech_inv, vech_len};

use crate::kyp::{extremal_solutions, kyp_matrix};
use crate::numkernels::{min_sym_eigenvalue, solve_lyapunov, solve_sylvester, symmetrize};
use crate::systems::{ExtendedPhSystem, LtiSystem};
use crate::{Error, Mat, Result, Vector};

/// Precomputed data of the energy-matching objective.
#[derive(Debug, Clone)]
pub struct EnergyMatchProblem {
    /// Controllability Gramian of the full model.
    pub p_fom: Mat,
    /// Hamiltonian Hessian of the full model.
    pub q_fom: Mat,
    /// Controllability Gramian of the reduced model.
    pub p_rom: Mat,
    /// Cross Sylvester solution of `A Y + Y Ar' + B Br' = 0`.
    pub y: Mat,
    /// `Y' Q Y`, the fixed linear-term factor.
    pub ytqy: Mat,
    /// Reduced model the problem was built for.
    pub rom_lti: LtiSystem,
    /// `tr(PQPQ)/4`, the squared Hamiltonian norm of the full model.
    pub const_term: f64,
    /// Worst relative residual over the three matrix-equation solves.
    pub solve_residual: f64,
}

/// Barrier-method configuration. The `alpha_schedule` defaults to the
/// decades from `1e-3` down to `1e-15`.
#[derive(Debug, Clone)]
pub struct EnergyMatchConfig {
    pub alpha_schedule: Vec<f64>,
    pub bfgs_grad_tol: f64,
    pub bfgs_max_iter: usize,
    pub init: InitStrategy,
    pub feasibility_tol: f64,
    pub kkt_tol: f64,
}

#[derive(Debug, Clone, Default)]
pub enum InitStrategy {
    /// Evaluate the objective at the extremal KYP solutions and their
    /// midpoint, take the best, perturb into the interior.
    #[default]
    CandidateSet,
    /// Start from a supplied feasible matrix.
    UserSupplied(Mat),
}

impl Default for EnergyMatchConfig {
    fn default() -> Self {
        Self {
            alpha_schedule: (3..=15).map(|k| 10f64.powi(-k)).collect(),
            bfgs_grad_tol: 1e-9,
            bfgs_max_iter: 500,
            init: InitStrategy::CandidateSet,
            feasibility_tol: 1e-8,
            kkt_tol: 1e-6,
        }
    }
}

impl EnergyMatchConfig {
    fn validate(&self) -> Result<()> {
        if self.alpha_schedule.is_empty() {
            return Err(Error::InvalidArgument("alpha schedule must not be empty".into()));
        }
        for w in self.alpha_schedule.windows(2) {
            if !(w[1] < w[0]) {
                return Err(Error::InvalidArgument(
                    "alpha schedule must be strictly decreasing".into(),
                ));
            }
        }
        if self.alpha_schedule.iter().any(|&a| !(a > 0.0)) {
            return Err(Error::InvalidArgument("alpha values must be positive".into()));
        }
        Ok(())
    }
}

/// Progress record of one barrier stage.
#[derive(Debug, Clone)]
pub struct AlphaStage {
    pub alpha: f64,
    pub cost: f64,
    pub bfgs_iterations: usize,
    pub bfgs_converged: bool,
}

/// Outcome of [`energy_match`].
#[derive(Debug, Clone)]
pub struct EnergyMatchResult {
    pub q_opt: Mat,
    /// `J(q_opt)`, the squared Hamiltonian-dynamic H2 error.
    pub cost: f64,
    pub cost_history: Vec<AlphaStage>,
    /// Smallest eigenvalue of the KYP matrix at the optimum.
    pub min_eig_w: f64,
    pub converged: bool,
    /// First-order condition at the optimum: small projected gradient or
    /// an active boundary.
    pub kkt_satisfied: bool,
    pub boundary_active: bool,
    /// Artificial feedthrough added to the reduced model before matching.
    pub feedthrough_eps: Option<f64>,
    /// The reduced model actually used (feedthrough-shifted when `eps`
    /// was added); refactorizations must use this system.
    pub rom_effective: LtiSystem,
    /// Objective values at the initialization candidates.
    pub candidate_costs: Vec<f64>,
}

/// Solves the three fixed matrix equations behind the cost functional.
pub fn build_problem(fom: &ExtendedPhSystem, rom: &LtiSystem) -> Result<EnergyMatchProblem> {
    let io = fom.io();
    for sys in [&io, rom] {
        let abscissa = sys.spectral_abscissa()?;
        if abscissa >= 0.0 {
            return Err(Error::Unstable(abscissa));
        }
    }
    if io.inputs() != rom.inputs() {
        return Err(Error::DimensionMismatch("input dimensions differ".into()));
    }
    let q_fom = symmetrize(&fom.ph.q);
    let (p_fom, rep1) = solve_lyapunov(&io.a, &(&io.b * io.b.transpose()))?;
    let (p_rom, rep2) = solve_lyapunov(&rom.a, &(&rom.b * rom.b.transpose()))?;
    let (y, rep3) = solve_sylvester(&io.a, &rom.a.transpose(), &(&io.b * rom.b.transpose()))?;
    let pq = &p_fom * &q_fom;
    let const_term = 0.25 * (&pq * &pq).trace();
    let ytqy = symmetrize(&(y.transpose() * &q_fom * &y));
    Ok(EnergyMatchProblem {
        p_fom,
        q_fom,
        p_rom,
        y,
        ytqy,
        rom_lti: rom.clone(),
        const_term,
        solve_residual: rep1.residual_rel.max(rep2.residual_rel).max(rep3.residual_rel),
    })
}

/// Cost functional `J(Qhat)`.
pub fn cost(prob: &EnergyMatchProblem, qhat: &Mat) -> f64 {
    let pq = &prob.p_rom * qhat;
    prob.const_term + 0.25 * (&pq * &pq).trace() - 0.5 * (&prob.ytqy * qhat).trace()
}

/// Gradient `(Pr Qhat Pr - Y'QY) / 2`, symmetrized.
pub fn grad_cost(prob: &EnergyMatchProblem, qhat: &Mat) -> Mat {
    symmetrize(&((&prob.p_rom * qhat * &prob.p_rom - &prob.ytqy) * 0.5))
}

/// Log-det barrier `psi(Qhat) = -ln det W(Qhat)` on the interior of the
/// semidefinite cone, infinity outside.
pub fn barrier(rom: &LtiSystem, qhat: &Mat) -> f64 {
    let w = kyp_matrix(rom, qhat);
    match w.cholesky() {
        Some(chol) => {
            let l = chol.l();
            let mut acc = 0.0;
            for i in 0..l.nrows() {
                acc += l[(i, i)].ln();
            }
            -2.0 * acc
        }
        None => f64::INFINITY,
    }
}

/// Gradient of the barrier: with `T = W^{-1} [-Ahat'; -Bhat']` the
/// derivative of `ln det W` is the symmetric sum of the leading block of
/// `T`, and the barrier carries the opposite sign.
pub fn grad_barrier(rom: &LtiSystem, qhat: &Mat) -> Result<Mat> {
    let r = rom.order();
    let m = rom.inputs();
    let w = kyp_matrix(rom, qhat);
    let chol = w
        .cholesky()
        .ok_or_else(|| Error::NotFeasible(min_sym_eigenvalue(&kyp_matrix(rom, qhat))))?;
    let mut rhs = Mat::zeros(r + m, r);
    rhs.view_mut((0, 0), (r, r)).copy_from(&(-rom.a.transpose()));
    rhs.view_mut((r, 0), (m, r)).copy_from(&(-rom.b.transpose()));
    let t = chol.solve(&rhs);
    let m1 = t.view((0, 0), (r, r)).clone_owned();
    Ok(-(m1.clone() + m1.transpose()))
}

fn feasibility_scale(rom: &LtiSystem, qhat: &Mat) -> f64 {
    kyp_matrix(rom, qhat).norm().max(1.0)
}

/// Runs the barrier method (Algorithm: decreasing alpha schedule with a
/// warm-started BFGS per stage).
pub fn energy_match(
    fom: &ExtendedPhSystem,
    rom: &LtiSystem,
    cfg: &EnergyMatchConfig,
) -> Result<EnergyMatchResult> {
    cfg.validate()?;
    // Strict passivity of the reduced model: regularize the feedthrough
    // when the barrier would have an empty interior.
    let dsum = &rom.d + rom.d.transpose();
    let needs_eps =
        rom.inputs() > 0 && min_sym_eigenvalue(&dsum) < 1e-12 * dsum.amax().max(1.0);
    let (rom_eff, eps) = if needs_eps {
        (rom.with_feedthrough_shift(1e-6), Some(1e-6))
    } else {
        (rom.clone(), None)
    };

    let prob = build_problem(fom, &rom_eff)?;
    let r = rom_eff.order();

    // Initialization candidates: extremal KYP solutions and their
    // midpoint (all feasible by convexity), optionally a user start.
    let mut candidates: Vec<Mat> = Vec::new();
    match &cfg.init {
        InitStrategy::UserSupplied(q0) => {
            if q0.nrows() != r || q0.ncols() != r {
                return Err(Error::DimensionMismatch("supplied start has wrong size".into()));
            }
            candidates.push(symmetrize(q0));
        }
        InitStrategy::CandidateSet => {
            let (cmin, cmax) = extremal_solutions(&rom_eff)?;
            let mid = (&cmin.x + &cmax.x) * 0.5;
            candidates.push(cmin.x);
            candidates.push(cmax.x);
            candidates.push(mid);
        }
    }
    let candidate_costs: Vec<f64> = candidates.iter().map(|q| cost(&prob, q)).collect();
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&i, &j| candidate_costs[i].total_cmp(&candidate_costs[j]));

    // Interior starting points. Route one: the best candidate perturbed
    // by a doubling multiple of the identity until the Cholesky of W
    // succeeds, then deepened while it keeps succeeding (a sliver-thin
    // margin stalls the first line search). Route two: with more states
    // than inputs the whole segment between the extremal solutions lies
    // on the cone boundary (the rank-m KYP kernels must intersect) and
    // identity rays can miss the interior entirely; the cone-shifted
    // Riccati solution has KYP Schur complement eta I and is a certified
    // interior point. The start with the lower first-stage objective
    // wins.
    let mut starts: Vec<Mat> = Vec::new();
    'cands: for &ci in &order {
        let cand = &candidates[ci];
        let base_delta = 1e-8 * cand.norm().max(1.0);
        for k in 0..44 {
            let delta = if k == 0 { 0.0 } else { base_delta * 2f64.powi(k - 1) };
            for sign in [1.0, -1.0] {
                let q0 = cand + Mat::identity(r, r) * (sign * delta);
                if barrier(&rom_eff, &q0).is_finite() {
                    let mut best_q = q0;
                    let mut d = delta.max(base_delta);
                    for _ in 0..40 {
                        d *= 2.0;
                        let deeper = cand + Mat::identity(r, r) * (sign * d);
                        if barrier(&rom_eff, &deeper).is_finite() {
                            best_q = deeper;
                        } else {
                            break;
                        }
                    }
                    starts.push(best_q);
                    break 'cands;
                }
                if delta == 0.0 {
                    break;
                }
            }
        }
    }
    {
        // The largest admissible shift is the strict-passivity margin,
        // which is unknown; scan downward until the equation solves and
        // the point certifies as interior.
        let mut eta = 1e-3 * rom_eff.a.norm().max(1.0);
        for _ in 0..60 {
            if let Ok(sol) = crate::numkernels::solve_are_shifted(
                &rom_eff.a,
                &rom_eff.b,
                &rom_eff.c,
                &rom_eff.d,
                eta,
                crate::numkernels::Extremal::Min,
            ) {
                if barrier(&rom_eff, &sol.x).is_finite() {
                    starts.push(sol.x);
                    break;
                }
            }
            eta /= 8.0;
            if eta < f64::MIN_POSITIVE * 1e10 {
                break;
            }
        }
    }
    let alpha0 = cfg.alpha_schedule[0];
    let q_start = starts
        .into_iter()
        .min_by(|a, b| {
            let fa = cost(&prob, a) + alpha0 * barrier(&rom_eff, a);
            let fb = cost(&prob, b) + alpha0 * barrier(&rom_eff, b);
            fa.total_cmp(&fb)
        })
        .ok_or(Error::NoInteriorPoint)?;

    // Track the best feasible point seen anywhere, including the raw
    // candidates, so the result never regresses below its initialization.
    let ftol_of = |q: &Mat| cfg.feasibility_tol * feasibility_scale(&rom_eff, q);
    let is_feasible_q = |q: &Mat| {
        let w = kyp_matrix(&rom_eff, q);
        min_sym_eigenvalue(&w) >= -ftol_of(q) && min_sym_eigenvalue(q) > 0.0
    };
    let mut best: (f64, Mat) = (f64::INFINITY, q_start.clone());
    for (ci, cand) in candidates.iter().enumerate() {
        if candidate_costs[ci] < best.0 && is_feasible_q(cand) {
            best = (candidate_costs[ci], cand.clone());
        }
    }

    // Diagonal preconditioner from the quadratic part of the objective:
    // the Hessian of J is the packed form of (Pr (x) Pr)/2, whose
    // conditioning follows the squared Gramian spectrum. BFGS starts from
    // a scaled identity, so whitening the variable by the Hessian
    // diagonal saves hundreds of iterations on balanced models.
    let nv = vech_len(r);
    let precond = {
        let mut d = Vector::zeros(nv);
        for k in 0..nv {
            let mut unit = Vector::zeros(nv);
            unit[k] = 1.0;
            let ek = vech_inv(&unit, r);
            let col = pullback_gradient(&((&prob.p_rom * ek * &prob.p_rom) * 0.5));
            d[k] = col[k].abs();
        }
        let dmax = d.amax().max(f64::MIN_POSITIVE);
        Vector::from_fn(nv, |k, _| d[k].max(1e-12 * dmax).sqrt())
    };
    let scale_in = |q: &Vector| Vector::from_fn(nv, |k, _| q[k] * precond[k]);
    let scale_out = |q: &Vector| Vector::from_fn(nv, |k, _| q[k] / precond[k]);

    let mut q_vec = scale_in(&vech(&q_start));
    let mut history = Vec::with_capacity(cfg.alpha_schedule.len());
    let mut all_converged = true;
    let mut h_carry: Option<crate::Mat> = None;
    for &alpha in &cfg.alpha_schedule {
        let eval = |q: &Vector| -> (f64, Vector) {
            let qhat = vech_inv(&scale_out(q), r);
            let psi = barrier(&rom_eff, &qhat);
            if !psi.is_finite() {
                return (f64::INFINITY, Vector::zeros(q.len()));
            }
            let j = cost(&prob, &qhat);
            let g = grad_cost(&prob, &qhat)
                + grad_barrier(&rom_eff, &qhat).expect("interior point") * alpha;
            let g_packed = pullback_gradient(&g);
            (j + alpha * psi, Vector::from_fn(nv, |k, _| g_packed[k] / precond[k]))
        };
        let out =
            bfgs::minimize_warm(eval, q_vec.clone(), cfg.bfgs_max_iter, cfg.bfgs_grad_tol, h_carry);
        h_carry = Some(out.h);
        q_vec = out.x;
        let qhat = vech_inv(&scale_out(&q_vec), r);
        let stage_cost = cost(&prob, &qhat);
        history.push(AlphaStage {
            alpha,
            cost: stage_cost,
            bfgs_iterations: out.iterations,
            bfgs_converged: out.converged,
        });
        all_converged &= out.converged;
        if stage_cost < best.0 && is_feasible_q(&qhat) {
            best = (stage_cost, qhat);
        }
    }

    let (best_cost, q_opt) = best;
    let w_opt = kyp_matrix(&rom_eff, &q_opt);
    let min_eig_w = min_sym_eigenvalue(&w_opt);
    let boundary_active = min_eig_w < ftol_of(&q_opt);
    let grad_inf = pullback_gradient(&grad_cost(&prob, &q_opt)).amax();
    let kkt_satisfied = grad_inf <= cfg.kkt_tol * best_cost.abs().max(1.0) || boundary_active;

    Ok(EnergyMatchResult {
        q_opt,
        cost: best_cost.max(0.0),
        cost_history: history,
        min_eig_w,
        converged: all_converged,
        kkt_satisfied,
        boundary_active,
        feedthrough_eps: eps,
        rom_effective: rom_eff,
        candidate_costs,
    })
}
