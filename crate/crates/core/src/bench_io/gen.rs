//! Benchmark system generators: a mass-spring-damper chain, an RCL
//! ladder network and the printed toy examples.

use super::format::SystemFile;
use crate::systems::{ExtendedPhSystem, LtiSystem, PhSystem};
use crate::{Error, Mat, Result};

/// Parameters of the mass-spring-damper chain. Coefficient vectors hold
/// either one shared value or one value per mass.
#[derive(Debug, Clone)]
pub struct MsdParams {
    pub n_masses: usize,
    pub masses: Vec<f64>,
    pub spring_consts: Vec<f64>,
    pub damper_consts: Vec<f64>,
    /// Number of force inputs / velocity outputs, applied to the leading
    /// masses.
    pub io_dim: usize,
}

impl MsdParams {
    /// Documented default parametrization: masses 4, springs 4,
    /// dampers 1.
    pub fn new(n_masses: usize, io_dim: usize) -> Self {
        Self {
            n_masses,
            masses: vec![4.0],
            spring_consts: vec![4.0],
            damper_consts: vec![1.0],
            io_dim,
        }
    }
}

fn per_element(vals: &[f64], count: usize, what: &str) -> Result<Vec<f64>> {
    let out = if vals.len() == 1 {
        vec![vals[0]; count]
    } else if vals.len() == count {
        vals.to_vec()
    } else {
        return Err(Error::InvalidArgument(format!(
            "{what}: expected 1 or {count} values, got {}",
            vals.len()
        )));
    };
    if out.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidArgument(format!("{what} must be positive")));
    }
    Ok(out)
}

/// Chain of masses, each tied to its predecessor by a spring (the first
/// to a wall) and to the ground by a viscous damper. Forces act on the
/// first `io_dim` masses with collocated velocity outputs. State layout
/// `x = [positions; momenta]` gives
///
/// ```text
/// J = [[0, I], [-I, 0]],  R = blkdiag(0, C),  Q = blkdiag(K, M^{-1}),
/// G = [0; F],  P = 0,  S = N = 0.
/// ```
pub fn gen_msd(params: &MsdParams) -> Result<ExtendedPhSystem> {
    let g_count = params.n_masses;
    if g_count == 0 {
        return Err(Error::InvalidArgument("need at least one mass".into()));
    }
    if params.io_dim == 0 || params.io_dim > g_count {
        return Err(Error::InvalidArgument("io dimension out of range".into()));
    }
    let masses = per_element(&params.masses, g_count, "masses")?;
    let springs = per_element(&params.spring_consts, g_count, "spring constants")?;
    let dampers = per_element(&params.damper_consts, g_count, "damper constants")?;

    let n = 2 * g_count;
    let m = params.io_dim;

    // Stiffness of the wall-anchored chain.
    let mut k = Mat::zeros(g_count, g_count);
    for i in 0..g_count {
        k[(i, i)] = springs[i] + if i + 1 < g_count { springs[i + 1] } else { 0.0 };
        if i + 1 < g_count {
            k[(i, i + 1)] = -springs[i + 1];
            k[(i + 1, i)] = -springs[i + 1];
        }
    }

    let mut j = Mat::zeros(n, n);
    let mut r = Mat::zeros(n, n);
    let mut q = Mat::zeros(n, n);
    let mut g = Mat::zeros(n, m);
    for i in 0..g_count {
        j[(i, g_count + i)] = 1.0;
        j[(g_count + i, i)] = -1.0;
        r[(g_count + i, g_count + i)] = dampers[i];
        q[(g_count + i, g_count + i)] = 1.0 / masses[i];
    }
    q.view_mut((0, 0), (g_count, g_count)).copy_from(&k);
    for col in 0..m {
        g[(g_count + col, col)] = 1.0;
    }

    let ph = PhSystem::new(
        j,
        r,
        q,
        g,
        Mat::zeros(n, m),
        Mat::zeros(m, m),
        Mat::zeros(m, m),
    )?;
    Ok(ExtendedPhSystem::new(ph))
}

/// Parameters of the single-input single-output RCL ladder.
#[derive(Debug, Clone)]
pub struct RclParams {
    pub n_cells: usize,
    pub r_val: f64,
    pub c_val: f64,
    pub l_val: f64,
}

impl RclParams {
    pub fn new(n_cells: usize) -> Self {
        Self { n_cells, r_val: 1.0, c_val: 1.0, l_val: 1.0 }
    }
}

/// Voltage-driven ladder: each cell carries a series inductor feeding a
/// node with a capacitor and a resistor to ground. States interleave
/// inductor fluxes and capacitor charges; input is the source voltage,
/// output the collocated input current. Long ladders are numerically
/// non-minimal because the reachability of far cells decays
/// exponentially.
pub fn gen_rcl(params: &RclParams) -> Result<ExtendedPhSystem> {
    let cells = params.n_cells;
    if cells == 0 {
        return Err(Error::InvalidArgument("need at least one cell".into()));
    }
    for (name, v) in [("R", params.r_val), ("C", params.c_val), ("L", params.l_val)] {
        if !(v > 0.0) {
            return Err(Error::InvalidArgument(format!("{name} must be positive")));
        }
    }
    let n = 2 * cells;
    let mut j = Mat::zeros(n, n);
    let mut r = Mat::zeros(n, n);
    let mut q = Mat::zeros(n, n);
    let mut g = Mat::zeros(n, 1);
    for i in 0..cells {
        let flux = 2 * i;
        let charge = 2 * i + 1;
        // Energy: phi^2/(2L) + q^2/(2C)
        q[(flux, flux)] = 1.0 / params.l_val;
        q[(charge, charge)] = 1.0 / params.c_val;
        // Current into this node from its inductor, voltage back.
        j[(flux, charge)] = -1.0;
        j[(charge, flux)] = 1.0;
        // Current leaving toward the next cell's inductor.
        if i + 1 < cells {
            let next_flux = 2 * (i + 1);
            j[(charge, next_flux)] = -1.0;
            j[(next_flux, charge)] = 1.0;
        }
        // Resistor to ground at the node.
        r[(charge, charge)] = 1.0 / params.r_val;
    }
    g[(0, 0)] = 1.0;
    let ph = PhSystem::new(
        j,
        r,
        q,
        g,
        Mat::zeros(n, 1),
        Mat::zeros(1, 1),
        Mat::zeros(1, 1),
    )?;
    Ok(ExtendedPhSystem::new(ph))
}

/// The toy systems printed in the worked examples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PaperExample {
    /// Order-2 pH system that is controllable but not observable in its
    /// io view; the Hamiltonian still needs both states.
    Ex4_1,
    /// Order-2 pH model of the energy-matching walkthrough.
    Ex5_1,
    /// The order-1 Galerkin surrogate paired with it.
    Ex5_1Rom,
    /// Positive-real balanced model whose order-1 truncation is optimal.
    Ex5_5,
    /// Positive-real balanced model whose order-1 truncation is not.
    Ex5_6,
}

impl PaperExample {
    pub fn parse(tag: &str) -> Option<Self> {
        match tag {
            "ex4_1" => Some(Self::Ex4_1),
            "ex5_1" => Some(Self::Ex5_1),
            "ex5_1_rom" => Some(Self::Ex5_1Rom),
            "ex5_5" => Some(Self::Ex5_5),
            "ex5_6" => Some(Self::Ex5_6),
            _ => None,
        }
    }
}

pub fn gen_paper_example(which: PaperExample) -> SystemFile {
    match which {
        PaperExample::Ex4_1 => SystemFile::Ph(ExtendedPhSystem::new(
            PhSystem::new(
                Mat::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]),
                Mat::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 2.0]),
                Mat::identity(2, 2),
                Mat::from_column_slice(2, 1, &[1.0, 0.0]),
                Mat::zeros(2, 1),
                Mat::zeros(1, 1),
                Mat::zeros(1, 1),
            )
            .expect("static data"),
        )),
        PaperExample::Ex5_1 => SystemFile::Ph(ExtendedPhSystem::new(
            PhSystem::new(
                Mat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]),
                Mat::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]),
                Mat::identity(2, 2),
                Mat::from_column_slice(2, 1, &[6.0, 0.0]),
                Mat::zeros(2, 1),
                Mat::from_element(1, 1, 1.0),
                Mat::zeros(1, 1),
            )
            .expect("static data"),
        )),
        PaperExample::Ex5_1Rom => SystemFile::Lti(
            LtiSystem::new(
                Mat::from_element(1, 1, -2.0),
                Mat::from_element(1, 1, 6.0),
                Mat::from_element(1, 1, 6.0),
                Mat::from_element(1, 1, 1.0),
            )
            .expect("static data"),
        ),
        PaperExample::Ex5_5 => SystemFile::Lti(
            LtiSystem::new(
                Mat::from_row_slice(2, 2, &[-2.0, -4.0, -4.0, -9.0]),
                Mat::from_column_slice(2, 1, &[4.0, 4.0]),
                Mat::from_row_slice(1, 2, &[4.0, 4.0]),
                Mat::from_element(1, 1, 1.0),
            )
            .expect("static data"),
        ),
        PaperExample::Ex5_6 => SystemFile::Lti(
            LtiSystem::new(
                Mat::from_row_slice(2, 2, &[-1.0, -4.5, -4.5, -27.0]),
                Mat::from_column_slice(2, 1, &[4.0, 4.0]),
                Mat::from_row_slice(1, 2, &[4.0, 4.0]),
                Mat::from_element(1, 1, 1.0 / 3.0),
            )
            .expect("static data"),
        ),
    }
}

/// Known minimal KYP solutions of the balanced printed models; used to
/// re-factor them as pH systems.
pub fn paper_example_q_min(which: PaperExample) -> Option<Mat> {
    match which {
        PaperExample::Ex5_5 => Some(Mat::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.25])),
        PaperExample::Ex5_6 => Some(Mat::from_row_slice(2, 2, &[0.75, 0.0, 0.0, 0.25])),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernels::spectral_abscissa;
    use crate::systems::{default_validation_tol, validate_ph};

    #[test]
    fn single_mass_chain_matches_hand_assembly() {
        let params = MsdParams {
            n_masses: 1,
            masses: vec![1.0],
            spring_consts: vec![1.0],
            damper_consts: vec![1.0],
            io_dim: 1,
        };
        let sys = gen_msd(&params).unwrap();
        // x = [q, p]: A = [[0, 1], [-1, -1]]
        let io = sys.io();
        let expect = Mat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, -1.0]);
        assert!((io.a - expect).norm() < 1e-14);
        assert!((io.c.transpose() - io.b).norm() < 1e-14, "collocated io");
    }

    #[test]
    fn msd_default_is_valid_and_stable() {
        let sys = gen_msd(&MsdParams::new(50, 2)).unwrap();
        assert_eq!(sys.order(), 100);
        assert!(validate_ph(&sys.ph, 1e-12).is_valid());
        let io = sys.io();
        assert!(spectral_abscissa(&io.a).unwrap() < 0.0);
    }

    #[test]
    fn msd_structure_by_construction() {
        let sys = gen_msd(&MsdParams::new(7, 3)).unwrap();
        let tol = default_validation_tol(&sys.ph);
        assert!(validate_ph(&sys.ph, tol).is_valid());
        assert!(crate::numkernels::min_sym_eigenvalue(&sys.ph.q) > 0.0);
    }

    #[test]
    fn one_cell_ladder_hand_checked() {
        let sys = gen_rcl(&RclParams { n_cells: 1, r_val: 2.0, c_val: 3.0, l_val: 5.0 }).unwrap();
        // states [phi, q]: phi' = u - q/C, q' = phi/L - q/(RC)
        let io = sys.io();
        let expect = Mat::from_row_slice(2, 2, &[0.0, -1.0 / 3.0, 1.0 / 5.0, -1.0 / 6.0]);
        assert!((io.a - expect).norm() < 1e-14);
        assert!((io.b - Mat::from_column_slice(2, 1, &[1.0, 0.0])).norm() < 1e-14);
        // y = phi / L
        assert!((io.c - Mat::from_row_slice(1, 2, &[1.0 / 5.0, 0.0])).norm() < 1e-14);
    }

    #[test]
    fn ladder_is_valid_ph_and_stable() {
        let sys = gen_rcl(&RclParams::new(20)).unwrap();
        assert!(validate_ph(&sys.ph, 1e-12).is_valid());
        assert!(spectral_abscissa(&sys.io().a).unwrap() < 0.0);
    }

    #[test]
    fn long_ladder_is_numerically_non_minimal() {
        let sys = gen_rcl(&RclParams::new(100)).unwrap();
        let minimal = crate::structure::minimal_realization(&sys, 1e-10).unwrap();
        assert!(
            minimal.order() < sys.order(),
            "minimal order {} of {}",
            minimal.order(),
            sys.order()
        );
        // A tighter rank tolerance cuts less and certifies a smaller
        // model error.
        let minimal12 = crate::structure::minimal_realization(&sys, 1e-12).unwrap();
        assert!(minimal12.order() < sys.order());
        let dist = crate::gramians::h2_dist_extended(&sys, &minimal12).unwrap();
        let scale = crate::gramians::h2_norm_extended(&sys).unwrap();
        assert!(dist < 1e-6 * scale, "relative distance {}", dist / scale);
    }

    #[test]
    fn paper_examples_print_exact_matrices() {
        let ex41 = gen_paper_example(PaperExample::Ex4_1);
        let io = ex41.io();
        assert!((io.a - Mat::from_row_slice(2, 2, &[-1.0, 0.0, 2.0, -2.0])).norm() < 1e-15);
        let ex55 = gen_paper_example(PaperExample::Ex5_5);
        assert_eq!(ex55.io().a[(0, 0)], -2.0);
        let ex56 = gen_paper_example(PaperExample::Ex5_6);
        assert!((ex56.io().d[(0, 0)] - 1.0 / 3.0).abs() < 1e-16);
    }
}
