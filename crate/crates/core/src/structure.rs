//! Structure-preserving Kalman-like decomposition of extended pH systems
//! and minimal realization.
//!
//! The state space splits into four parts: controllable/observable (co),
//! uncontrollable/observable (c-bar o), controllable with unobservable
//! Hamiltonian (c o-bar, inside ker Q) and neither (c-bar o-bar). States
//! in ker Q never influence the linear or the Hamiltonian output, and the
//! (co) block alone reproduces the full extended input-output map from a
//! zero initial state. Removing ker Q uses an orthogonal eigenbasis of
//! `Q`; the controllable/uncontrollable split uses a Cholesky congruence
//! that normalizes the Hamiltonian to the identity followed by an
//! orthogonal staircase, which keeps every block in pH form.

use crate::numkernels::{
    controllable_staircase, orthonormal_completion, skew_part, sym_eig, symmetrize,
};
use crate::systems::{ph_to_lti, ExtendedPhSystem, PhSystem};
use crate::{Error, Mat, Result};

/// Relative rank tolerance default: `n * eps`. Every rank decision scales
/// this by the norm of the matrix it inspects.
pub fn default_decomposition_tol(n: usize) -> f64 {
    (n.max(1)) as f64 * f64::EPSILON
}

/// Outcome of [`kalman_controllability_form`].
#[derive(Debug, Clone)]
pub struct ControllabilityForm {
    /// Transformed system with Hamiltonian Hessian `I` and the
    /// controllable block leading.
    pub sys: ExtendedPhSystem,
    /// State transformation, `x = V x_new`; not orthogonal in general.
    pub v: Mat,
    /// Dimension of the controllable block.
    pub n_c: usize,
    /// Largest coupling-block magnitude (relative) removed when zeroing
    /// the off-diagonal blocks of `J` and `R`. Values above the tolerance
    /// mean the input violates the decoupling structure supported by the
    /// congruence argument.
    pub coupling_residual: f64,
}

/// Block dimensions and transformation of the four-part decomposition.
#[derive(Debug, Clone)]
pub struct DecompositionReport {
    /// State transformation, `x = V x_new`, ordering the new state as
    /// `(co, c-bar-o, c-o-bar, c-bar-o-bar)`.
    pub v: Mat,
    /// `(n_co, n_cbar_o, n_c_obar, n_cbar_obar)`; sums to the order.
    pub dims: (usize, usize, usize, usize),
    /// The controllable, zero-state observable subsystem with `Q = I`.
    pub subsystem: ExtendedPhSystem,
    pub tol_used: f64,
    /// Largest magnitude found in a designated-zero block of the
    /// transformed operator before zeroing, relative to `|A|`.
    pub zero_block_residual: f64,
    /// Coupling residual passed through from the controllability form.
    pub coupling_residual: f64,
    /// Number of kernel directions whose principal angle against the
    /// controllability space fell in the ambiguous band.
    pub ambiguous_kernel_dirs: usize,
}

/// Square factor `L` with `Q = L L'`. Cholesky when `Q` is safely
/// definite, symmetric eigenvalue square root with clamping when only
/// marginally so.
fn hamiltonian_factor(q: &Mat, tol: f64) -> Result<Mat> {
    let qs = symmetrize(q);
    if let Some(chol) = qs.clone().cholesky() {
        return Ok(chol.l());
    }
    let (vals, vecs) = sym_eig(&qs);
    let n = vals.len();
    let max = vals[n - 1].max(0.0);
    if max <= 0.0 {
        return Err(Error::NotPositiveDefinite("Q is zero or negative".into()));
    }
    let floor = tol * max;
    if vals[0] < -floor {
        return Err(Error::NotPositiveDefinite(format!(
            "Q has eigenvalue {:.3e}",
            vals[0]
        )));
    }
    let sqrt_diag =
        crate::Vector::from_fn(n, |i, _| vals[i].max(floor.max(f64::EPSILON * max)).sqrt());
    Ok(&vecs * Mat::from_diagonal(&sqrt_diag))
}

/// Restricts the pH system to the image of `Q`, dropping eigendirections
/// with eigenvalues at or below `tol * lambda_max`. The extended
/// input-output map is unchanged because states in ker Q influence
/// neither output nor the remaining dynamics through `Q`. Identity when
/// `Q` is already positive definite at the tolerance.
pub fn remove_unobservable_hamiltonian(sys: &ExtendedPhSystem, tol: f64) -> ExtendedPhSystem {
    let ph = &sys.ph;
    let n = ph.order();
    let (vals, vecs) = sym_eig(&ph.q);
    let max = vals[n.saturating_sub(1)].max(0.0);
    let cutoff = tol * max;
    let keep: Vec<usize> = (0..n).filter(|&i| vals[i] > cutoff).collect();
    if keep.len() == n {
        return sys.clone();
    }
    let v1 = select_columns(&vecs, &keep);
    ExtendedPhSystem::new(restrict(ph, &v1))
}

fn select_columns(m: &Mat, idx: &[usize]) -> Mat {
    let mut out = Mat::zeros(m.nrows(), idx.len());
    for (k, &i) in idx.iter().enumerate() {
        out.set_column(k, &m.column(i));
    }
    out
}

/// Orthogonal restriction of a pH septuple to the span of `v1`.
fn restrict(ph: &PhSystem, v1: &Mat) -> PhSystem {
    PhSystem {
        j: skew_part(&(v1.transpose() * &ph.j * v1)),
        r: symmetrize(&(v1.transpose() * &ph.r * v1)),
        q: symmetrize(&(v1.transpose() * &ph.q * v1)),
        g: v1.transpose() * &ph.g,
        p: v1.transpose() * &ph.p,
        s: ph.s.clone(),
        n: ph.n.clone(),
    }
}

/// Controllability decomposition of a pH system with positive definite
/// `Q`: Cholesky congruence to Hamiltonian `I`, orthogonal staircase on
/// `(J - R, G - P)`, coupling blocks zeroed.
///
/// The staircase detects exact (structural) unreachability. On stable
/// systems the controllable block is refined further: reachability
/// Gramian eigendirections at or below `tol * lambda_max` count as
/// numerically unreachable and move to the uncontrollable block. This is
/// a tolerance-level cut, and the coupling residual reports the energy
/// it discards.
pub fn kalman_controllability_form(sys: &ExtendedPhSystem, tol: f64) -> Result<ControllabilityForm> {
    let ph = &sys.ph;
    let n = ph.order();
    let l = hamiltonian_factor(&ph.q, tol)?;

    let j_t = skew_part(&(l.transpose() * &ph.j * &l));
    let r_t = symmetrize(&(l.transpose() * &ph.r * &l));
    let g_t = l.transpose() * &ph.g;
    let p_t = l.transpose() * &ph.p;

    let m = &j_t - &r_t;
    let b = &g_t - &p_t;
    let scale = m.norm().max(b.norm()).max(1.0);
    let st = controllable_staircase(&m, &b, tol * scale)?;
    let mut n_c = st.dim_controllable;

    // Gramian refinement of the controllable block.
    let mut v_basis = st.v.clone();
    if n_c > 0 {
        let a_c = {
            let mv = &m * v_basis.columns(0, n_c);
            v_basis.columns(0, n_c).transpose() * mv
        };
        let b_c = v_basis.columns(0, n_c).transpose() * &b;
        if crate::numkernels::spectral_abscissa(&a_c)? < 0.0 {
            let (p_reach, _) = crate::numkernels::solve_lyapunov(&a_c, &(&b_c * b_c.transpose()))?;
            let (vals, vecs) = sym_eig(&p_reach);
            let lmax = vals[n_c - 1].max(0.0);
            let keep: Vec<usize> =
                (0..n_c).filter(|&i| vals[i] > tol * lmax).collect();
            if keep.len() < n_c {
                // Reorder: dominant directions first, discarded ones join
                // the uncontrollable tail.
                let mut rot = Mat::zeros(n_c, n_c);
                let mut col = 0usize;
                for &i in keep.iter().rev() {
                    rot.set_column(col, &vecs.column(i));
                    col += 1;
                }
                for i in (0..n_c).filter(|i| !keep.contains(i)) {
                    rot.set_column(col, &vecs.column(i));
                    col += 1;
                }
                let rotated = v_basis.columns(0, n_c) * rot;
                v_basis.view_mut((0, 0), (n, n_c)).copy_from(&rotated);
                n_c = keep.len();
            }
        }
    }

    let mut j_new = skew_part(&(v_basis.transpose() * &j_t * &v_basis));
    let mut r_new = symmetrize(&(v_basis.transpose() * &r_t * &v_basis));
    let g_new = v_basis.transpose() * &g_t;
    let p_new = v_basis.transpose() * &p_t;

    // Zero the controllable/uncontrollable coupling blocks. For exactly
    // decoupled inputs the congruence forces them to vanish; after a
    // Gramian-level cut the residual reports the discarded influence.
    let mut coupling_residual = 0.0f64;
    let mut g_work = g_new;
    let mut p_work = p_new;
    if n_c < n {
        let nu = n - n_c;
        let jscale = j_new.norm().max(1.0);
        let rscale = r_new.norm().max(1.0);
        let gscale = g_work.norm().max(p_work.norm()).max(1.0);
        if n_c > 0 {
            coupling_residual = (j_new.view((0, n_c), (n_c, nu)).norm() / jscale)
                .max(r_new.view((0, n_c), (n_c, nu)).norm() / rscale);
            j_new.view_mut((0, n_c), (n_c, nu)).fill(0.0);
            j_new.view_mut((n_c, 0), (nu, n_c)).fill(0.0);
            r_new.view_mut((0, n_c), (n_c, nu)).fill(0.0);
            r_new.view_mut((n_c, 0), (nu, n_c)).fill(0.0);
        }
        let m_in = g_work.ncols();
        coupling_residual =
            coupling_residual.max(g_work.view((n_c, 0), (nu, m_in)).norm() / gscale);
        coupling_residual =
            coupling_residual.max(p_work.view((n_c, 0), (nu, m_in)).norm() / gscale);
        g_work.view_mut((n_c, 0), (nu, m_in)).fill(0.0);
        p_work.view_mut((n_c, 0), (nu, m_in)).fill(0.0);
    }
    let g_new = g_work;
    let p_new = p_work;

    // x = L^{-T} Vtilde x_new
    let v = l
        .transpose()
        .lu()
        .solve(&v_basis)
        .ok_or_else(|| Error::SingularPencil("Hamiltonian factor not invertible".into()))?;

    let ph_new = PhSystem {
        j: j_new,
        r: r_new,
        q: Mat::identity(n, n),
        g: g_new,
        p: p_new,
        s: ph.s.clone(),
        n: ph.n.clone(),
    };
    Ok(ControllabilityForm {
        sys: ExtendedPhSystem::new(ph_new),
        v,
        n_c,
        coupling_residual,
    })
}

/// Full four-block Kalman-like decomposition.
///
/// Splits ker Q against the controllability space by principal angles
/// (singular values of the product of orthonormal bases; values within
/// `1e-6` of one count as intersection directions), restricts to the
/// image of `Q` and applies the controllability form there, then builds
/// the combined transformation including the shear that makes the
/// `(c-bar, o-bar)` states inert.
pub fn kalman_full_form(sys: &ExtendedPhSystem, tol: f64) -> Result<DecompositionReport> {
    let ph = &sys.ph;
    let n = ph.order();
    let io = ph_to_lti(ph);

    // Kernel and image of Q.
    let (vals, vecs) = sym_eig(&ph.q);
    let qmax = vals[n.saturating_sub(1)].max(0.0);
    let cutoff = tol * qmax;
    let img_idx: Vec<usize> = (0..n).filter(|&i| vals[i] > cutoff).collect();
    let ker_idx: Vec<usize> = (0..n).filter(|&i| vals[i] <= cutoff).collect();
    let rank_q = img_idx.len();
    let k0 = ker_idx.len();
    let v1_basis = select_columns(&vecs, &img_idx);
    let kernel_basis = select_columns(&vecs, &ker_idx);

    // Controllability space of the io view.
    let scale = io.a.norm().max(io.b.norm()).max(1.0);
    let st = controllable_staircase(&io.a, &io.b, tol * scale)?;
    let n_c_io = st.dim_controllable;

    // Split the kernel into directions inside/outside the controllability
    // space via principal angles.
    let mut ambiguous = 0usize;
    let (v_co_bar, v_cbar_obar) = if k0 == 0 {
        (Mat::zeros(n, 0), Mat::zeros(n, 0))
    } else if n_c_io == 0 {
        (Mat::zeros(n, 0), kernel_basis.clone())
    } else {
        let u_c = st.v.columns(0, n_c_io).clone_owned();
        let prod = u_c.transpose() * &kernel_basis;
        let svd = crate::numkernels::jacobi_svd(&prod);
        let mut sigmas = vec![0.0f64; k0];
        for (i, s) in svd.sigma.iter().enumerate() {
            sigmas[i] = *s;
        }
        let v_right = orthonormal_completion(&svd.v);
        let mut in_cols = Vec::new();
        let mut out_cols = Vec::new();
        for i in 0..k0 {
            if sigmas[i] >= 1.0 - 1e-6 {
                in_cols.push(i);
            } else {
                if sigmas[i] > 0.5 {
                    ambiguous += 1;
                }
                out_cols.push(i);
            }
        }
        let rotated = &kernel_basis * v_right;
        (select_columns(&rotated, &in_cols), select_columns(&rotated, &out_cols))
    };
    let n_c_obar = v_co_bar.ncols();
    let n_cbar_obar = v_cbar_obar.ncols();

    // Observable part and its controllability split.
    let restricted = ExtendedPhSystem::new(restrict(ph, &v1_basis));
    let cf = kalman_controllability_form(&restricted, tol)?;
    let n_co = cf.n_c;
    let n_cbar_o = rank_q - n_co;

    // Combined transformation x = V x_new.
    let mut v = Mat::zeros(n, n);
    let v1_part = &v1_basis * &cf.v;
    v.view_mut((0, 0), (n, rank_q)).copy_from(&v1_part);
    if n_c_obar > 0 {
        v.view_mut((0, rank_q), (n, n_c_obar)).copy_from(&v_co_bar);
    }
    if n_cbar_obar > 0 {
        v.view_mut((0, rank_q + n_c_obar), (n, n_cbar_obar)).copy_from(&v_cbar_obar);
    }

    // Shear that turns the (c-bar, o-bar) rows inert: those states only
    // integrate contributions of the other blocks, and a change of
    // variables mixing in the observable and kernel-controllable states
    // absorbs that drive whenever the constraint system is solvable.
    let mut zero_block_residual = 0.0f64;
    if n_cbar_obar > 0 && rank_q + n_c_obar > 0 {
        let lu = v.clone().lu();
        let a_t = lu
            .solve(&(&io.a * &v))
            .ok_or_else(|| Error::SingularPencil("decomposition transform singular".into()))?;
        let b_t = lu
            .solve(&io.b)
            .ok_or_else(|| Error::SingularPencil("decomposition transform singular".into()))?;
        let row4 = rank_q + n_c_obar;
        let cols = rank_q + n_c_obar;
        // [T1 T3] [[A11, B1], [A31, B3]] = [M4 | 0] with A11 the leading
        // observable block row and A31 the kernel-controllable row.
        let mut k_mat = Mat::zeros(cols, rank_q + io.inputs());
        k_mat
            .view_mut((0, 0), (cols, rank_q))
            .copy_from(&a_t.view((0, 0), (cols, rank_q)));
        k_mat
            .view_mut((0, rank_q), (cols, io.inputs()))
            .copy_from(&b_t.view((0, 0), (cols, io.inputs())));
        let mut rhs = Mat::zeros(n_cbar_obar, rank_q + io.inputs());
        rhs.view_mut((0, 0), (n_cbar_obar, rank_q))
            .copy_from(&a_t.view((row4, 0), (n_cbar_obar, rank_q)));
        rhs.view_mut((0, rank_q), (n_cbar_obar, io.inputs()))
            .copy_from(&b_t.view((row4, 0), (n_cbar_obar, io.inputs())));
        // T K = RHS  <=>  K' T' = RHS', solved in least squares.
        let svd = crate::numkernels::jacobi_svd(&k_mat.transpose());
        let t_shear = svd.pinv_solve(&rhs.transpose(), tol * scale).transpose();
        let shear_res = (&t_shear * &k_mat - &rhs).norm() / scale;
        zero_block_residual = zero_block_residual.max(shear_res);
        // x_new = T xhat with T = I + embed(t_shear at (row4, 0..cols)):
        // V <- V T.
        let mut t_full = Mat::identity(n, n);
        t_full.view_mut((row4, 0), (n_cbar_obar, cols)).copy_from(&t_shear);
        v = &v * t_full;
    }

    // Measure the designated zero blocks of the final transformed operator.
    {
        let lu = v.clone().lu();
        let a_t = lu
            .solve(&(&io.a * &v))
            .ok_or_else(|| Error::SingularPencil("decomposition transform singular".into()))?;
        let b_t = lu
            .solve(&io.b)
            .ok_or_else(|| Error::SingularPencil("decomposition transform singular".into()))?;
        let offs = [0, n_co, n_co + n_cbar_o, n_co + n_cbar_o + n_c_obar, n];
        let sizes = [n_co, n_cbar_o, n_c_obar, n_cbar_obar];
        // Designated zeros by (row, col) block index, 1-based as in the
        // four-block form.
        let zero_blocks: [(usize, usize); 12] = [
            (0, 1),
            (0, 2),
            (0, 3),
            (1, 0),
            (1, 2),
            (1, 3),
            (2, 2),
            (2, 3),
            (3, 0),
            (3, 1),
            (3, 2),
            (3, 3),
        ];
        let ascale = io.a.norm().max(1.0);
        for (bi, bj) in zero_blocks {
            if sizes[bi] == 0 || sizes[bj] == 0 {
                continue;
            }
            let blk = a_t.view((offs[bi], offs[bj]), (sizes[bi], sizes[bj]));
            zero_block_residual = zero_block_residual.max(blk.norm() / ascale);
        }
        let bscale = io.b.norm().max(1.0);
        for bi in [1usize, 3usize] {
            if sizes[bi] == 0 {
                continue;
            }
            let blk = b_t.view((offs[bi], 0), (sizes[bi], io.inputs()));
            zero_block_residual = zero_block_residual.max(blk.norm() / bscale);
        }
    }

    // The (co) subsystem: leading block of the controllability form.
    let cph = &cf.sys.ph;
    let subsystem = ExtendedPhSystem::new(PhSystem {
        j: cph.j.view((0, 0), (n_co, n_co)).clone_owned(),
        r: cph.r.view((0, 0), (n_co, n_co)).clone_owned(),
        q: Mat::identity(n_co, n_co),
        g: cph.g.view((0, 0), (n_co, cph.inputs())).clone_owned(),
        p: cph.p.view((0, 0), (n_co, cph.inputs())).clone_owned(),
        s: cph.s.clone(),
        n: cph.n.clone(),
    });

    Ok(DecompositionReport {
        v,
        dims: (n_co, n_cbar_o, n_c_obar, n_cbar_obar),
        subsystem,
        tol_used: tol,
        zero_block_residual,
        coupling_residual: cf.coupling_residual,
        ambiguous_kernel_dirs: ambiguous,
    })
}

/// Minimal realization of the extended system: the controllable,
/// zero-state observable block, which reproduces the input-output and
/// Hamiltonian outputs exactly from a zero initial state.
pub fn minimal_realization(sys: &ExtendedPhSystem, tol: f64) -> Result<ExtendedPhSystem> {
    Ok(kalman_full_form(sys, tol)?.subsystem)
}

/// Builds a valid pH system with prescribed block dimensions
/// `(n_co, n_cbar_o, n_c_obar, n_cbar_obar)` and `m` inputs in canonical
/// form, then scrambles it with a well-conditioned congruence. The
/// construction keeps the observable diagonal blocks strictly dissipative
/// so they are asymptotically stable. Returns the scrambled system;
/// decompositions must recover exactly the prescribed dimensions.
pub fn synthetic_with_dims(
    dims: (usize, usize, usize, usize),
    m: usize,
    seed: u64,
) -> ExtendedPhSystem {
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    let (c1, c2, c3, c4) = dims;
    let n = c1 + c2 + c3 + c4;
    let mut rng = StdRng::seed_from_u64(seed);
    let rand_mat = |rows: usize, cols: usize, rng: &mut StdRng| {
        Mat::from_fn(rows, cols, |_, _| rng.random::<f64>() * 2.0 - 1.0)
    };

    let mut j = Mat::zeros(n, n);
    let mut r = Mat::zeros(n, n);
    let mut q = Mat::zeros(n, n);
    let mut g = Mat::zeros(n, m);

    let offs = [0, c1, c1 + c2, c1 + c2 + c3, n];
    // Skew diagonal blocks.
    for (bi, &sz) in [c1, c2, c3, c4].iter().enumerate() {
        if sz == 0 {
            continue;
        }
        let raw = rand_mat(sz, sz, &mut rng);
        let sk = skew_part(&raw);
        j.view_mut((offs[bi], offs[bi]), (sz, sz)).copy_from(&sk);
    }
    // Dissipation: strictly definite on observable blocks.
    for (bi, &sz) in [c1, c2, c3, c4].iter().enumerate() {
        if sz == 0 {
            continue;
        }
        let raw = rand_mat(sz, sz, &mut rng);
        let mut psd = &raw * raw.transpose();
        if bi < 2 {
            psd += Mat::identity(sz, sz) * 0.5;
        }
        r.view_mut((offs[bi], offs[bi]), (sz, sz)).copy_from(&psd);
    }
    // Hamiltonian: identity on observable blocks, zero on the kernel.
    for i in 0..c1 + c2 {
        q[(i, i)] = 1.0;
    }
    // Couplings allowed by the target form: kernel-controllable states may
    // receive from both observable blocks through J.
    if c3 > 0 && c1 > 0 {
        let j31 = rand_mat(c3, c1, &mut rng);
        j.view_mut((offs[2], offs[0]), (c3, c1)).copy_from(&j31);
        j.view_mut((offs[0], offs[2]), (c1, c3)).copy_from(&(-j31.transpose()));
    }
    if c3 > 0 && c2 > 0 {
        let j32 = rand_mat(c3, c2, &mut rng);
        j.view_mut((offs[2], offs[1]), (c3, c2)).copy_from(&j32);
        j.view_mut((offs[1], offs[2]), (c2, c3)).copy_from(&(-j32.transpose()));
    }
    // Inputs reach the controllable blocks only.
    if c1 > 0 {
        let g1 = rand_mat(c1, m, &mut rng);
        g.view_mut((offs[0], 0), (c1, m)).copy_from(&g1);
    }
    if c3 > 0 {
        // Combined with the J coupling from the co block this makes the
        // kernel-controllable block reachable even when m < c3.
        let g3 = rand_mat(c3, m, &mut rng);
        g.view_mut((offs[2], 0), (c3, m)).copy_from(&g3);
    }

    let p = Mat::zeros(n, m);
    let s = Mat::zeros(m, m);
    let nmat = Mat::zeros(m, m);

    // Well-conditioned congruence scramble: x_new = T x.
    let q1 = rand_mat(n, n, &mut rng).qr().q();
    let q2 = rand_mat(n, n, &mut rng).qr().q();
    let diag = Mat::from_diagonal(&crate::Vector::from_fn(n, |_, _| {
        0.8 + 0.4 * rng.random::<f64>()
    }));
    let t = &q1 * diag * &q2;
    let t_inv = t.clone().try_inverse().expect("well-conditioned by construction");

    let ph = PhSystem {
        j: skew_part(&(&t * &j * t.transpose())),
        r: symmetrize(&(&t * &r * t.transpose())),
        q: symmetrize(&(t_inv.transpose() * &q * &t_inv)),
        g: &t * &g,
        p: &t * &p,
        s,
        n: nmat,
    };
    ExtendedPhSystem::new(ph)
}
