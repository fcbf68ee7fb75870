//! Structure-preserving interpolatory reduction (pH-IRKA).
//!
//! One-sided rational interpolation: `V` collects shifted solves
//! `(sigma_i I - (J-R)Q)^{-1} (G-P) b_i`, and the test basis
//! `W = Q V (V'QV)^{-1}` makes the projected model automatically pH with
//! `Qhat = V'QV`. Shifts and tangent directions are updated from the
//! mirrored reduced spectrum until the shift set settles.

use super::{MethodTag, RomResult};
use crate::numkernels::{complex_eig, skew_part, symmetrize};
use crate::systems::{ExtendedPhSystem, PhSystem};
use crate::{CMat, CVector, Error, Mat, Result};
use nalgebra::Complex;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[derive(Debug, Clone)]
pub struct PhirkaOptions {
    pub max_iter: usize,
    /// Relative shift-change threshold declaring convergence.
    pub shift_tol: f64,
    /// Starting shifts; pairs with negative imaginary part are implied.
    /// When empty, logarithmically spaced real shifts spanning the
    /// spectrum magnitudes of `A` are used.
    pub initial_shifts: Vec<Complex<f64>>,
    /// Seed for the random unit tangent directions.
    pub seed: u64,
}

impl Default for PhirkaOptions {
    fn default() -> Self {
        Self { max_iter: 80, shift_tol: 1e-8, initial_shifts: Vec::new(), seed: 0 }
    }
}

/// A shift with its tangent direction; complex entries represent a
/// conjugate pair and contribute two real basis columns.
#[derive(Debug, Clone)]
struct ShiftSet {
    shifts: Vec<Complex<f64>>,
    tangents: Vec<CVector>,
}

pub fn phirka(fom: &ExtendedPhSystem, r: usize, opts: &PhirkaOptions) -> Result<RomResult> {
    let ph = &fom.ph;
    let n = ph.order();
    let m = ph.inputs();
    if r == 0 || r > n {
        return Err(Error::InvalidArgument(format!(
            "reduced order {r} out of range 1..={n}"
        )));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("pH-IRKA needs at least one input".into()));
    }
    let io = fom.io();
    let abscissa = io.spectral_abscissa()?;
    if abscissa >= 0.0 {
        return Err(Error::Unstable(abscissa));
    }

    let mut rng = StdRng::seed_from_u64(opts.seed);
    let mut current = initial_shift_set(&io.a, r, m, &opts.initial_shifts, &mut rng)?;
    let mut history = vec![current.shifts.clone()];
    let mut converged = false;
    let mut iterations = 0usize;
    let mut rom = project(ph, &io.a, &io.b, r, &current)?;

    for it in 1..=opts.max_iter {
        iterations = it;
        let rom_io = crate::systems::ph_to_lti(&rom);
        let next = mirrored_shift_set(&rom_io.a, &rom_io.b)?;
        let delta = shift_change(&current.shifts, &next.shifts);
        current = next;
        history.push(current.shifts.clone());
        rom = project(ph, &io.a, &io.b, r, &current)?;
        if delta < opts.shift_tol {
            converged = true;
            break;
        }
    }

    let rom_sys = ExtendedPhSystem::new(rom);
    let rom_lti = rom_sys.io();
    Ok(RomResult {
        rom_ph: rom_sys,
        rom_lti,
        method: MethodTag::Phirka,
        iterations: Some(iterations),
        shift_history: Some(history),
        characteristic_values: None,
        converged,
        feedthrough_eps: None,
    })
}

/// Log-spaced real shifts across the spectrum magnitudes, random unit
/// tangents. User-supplied shifts get random tangents as well.
fn initial_shift_set(
    a: &Mat,
    r: usize,
    m: usize,
    user: &[Complex<f64>],
    rng: &mut StdRng,
) -> Result<ShiftSet> {
    let mut shifts = Vec::with_capacity(r);
    if user.is_empty() {
        let eigs = crate::numkernels::eigenvalues(a)?;
        let mags: Vec<f64> = eigs.iter().map(|l| l.norm().max(1e-12)).collect();
        let lo = mags.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = mags.iter().cloned().fold(0.0f64, f64::max).max(lo * (1.0 + 1e-6));
        for k in 0..r {
            let t = if r == 1 { 0.5 } else { k as f64 / (r - 1) as f64 };
            shifts.push(Complex::new((lo.ln() + (hi.ln() - lo.ln()) * t).exp(), 0.0));
        }
    } else {
        shifts = user.to_vec();
    }
    let tangents = shifts
        .iter()
        .map(|_| {
            let mut v = CVector::from_fn(m, |_, _| {
                Complex::new(rng.random::<f64>() * 2.0 - 1.0, 0.0)
            });
            let norm = v.norm();
            if norm > 0.0 {
                v /= Complex::new(norm, 0.0);
            } else {
                v[0] = Complex::new(1.0, 0.0);
            }
            v
        })
        .collect();
    Ok(ShiftSet { shifts, tangents })
}

/// Mirrored spectrum of the reduced dynamics with tangents from the
/// eigenvector decomposition: row i of `X^{-1} B` belongs to shift
/// `-conj(lambda_i)`.
fn mirrored_shift_set(a_rom: &Mat, b_rom: &Mat) -> Result<ShiftSet> {
    let eig = complex_eig(a_rom)?;
    let r = a_rom.nrows();
    let m = b_rom.ncols();
    let bc = CMat::from_fn(r, m, |i, j| Complex::new(b_rom[(i, j)], 0.0));
    let tangent_mat = eig
        .vectors
        .clone()
        .lu()
        .solve(&bc)
        .ok_or_else(|| Error::SingularPencil("defective reduced spectrum".into()))?;
    let mut shifts = Vec::with_capacity(r);
    let mut tangents = Vec::with_capacity(r);
    for (i, lambda) in eig.values.iter().enumerate() {
        shifts.push(-lambda.conj());
        tangents.push(tangent_mat.row(i).transpose().clone_owned());
    }
    Ok(ShiftSet { shifts, tangents })
}

/// Sorted relative change between two shift sets.
fn shift_change(old: &[Complex<f64>], new: &[Complex<f64>]) -> f64 {
    let mut o: Vec<Complex<f64>> = old.to_vec();
    let mut n: Vec<Complex<f64>> = new.to_vec();
    let key = |z: &Complex<f64>| (z.re, z.im);
    o.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
    n.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
    o.iter()
        .zip(&n)
        .map(|(a, b)| (a - b).norm() / a.norm().max(1e-12))
        .fold(0.0, f64::max)
}

/// Builds the interpolation basis and the structure-preserving
/// projection.
fn project(
    ph: &PhSystem,
    a: &Mat,
    b: &Mat,
    r: usize,
    shifts: &ShiftSet,
) -> Result<PhSystem> {
    let n = ph.order();
    let mut v = Mat::zeros(n, r);
    let mut col = 0usize;
    let mut idx = 0usize;
    while col < r {
        if idx >= shifts.shifts.len() {
            return Err(Error::InvalidArgument(
                "shift set exhausted before filling the basis".into(),
            ));
        }
        let sigma = shifts.shifts[idx];
        let tangent = &shifts.tangents[idx];
        idx += 1;
        if sigma.im < 0.0 {
            // Conjugate partner of an already processed shift.
            continue;
        }
        if sigma.im.abs() <= 1e-12 * sigma.norm().max(1e-300) {
            let rhs = real_vector(&(b_times(b, tangent)));
            let shifted = Mat::from_fn(n, n, |i, j| {
                (if i == j { sigma.re } else { 0.0 }) - a[(i, j)]
            });
            let x = shifted
                .lu()
                .solve(&rhs)
                .ok_or(Error::ShiftSolveSingular(sigma.re, sigma.im))?;
            v.set_column(col, &x);
            col += 1;
        } else {
            let rhs = b_times(b, tangent);
            let shifted = CMat::from_fn(n, n, |i, j| {
                let d = if i == j { sigma } else { Complex::new(0.0, 0.0) };
                d - Complex::new(a[(i, j)], 0.0)
            });
            let x = shifted
                .lu()
                .solve(&rhs)
                .ok_or(Error::ShiftSolveSingular(sigma.re, sigma.im))?;
            let re = crate::Vector::from_fn(n, |i, _| x[i].re);
            v.set_column(col, &re);
            col += 1;
            if col < r {
                let im = crate::Vector::from_fn(n, |i, _| x[i].im);
                v.set_column(col, &im);
                col += 1;
            }
        }
    }

    // Orthonormalize the basis; the projected model depends on the span
    // only, up to a state-space equivalence.
    let v = orthonormalize(&v);
    build_rom(ph, &v)
}

fn b_times(b: &Mat, tangent: &CVector) -> CVector {
    let n = b.nrows();
    CVector::from_fn(n, |i, _| {
        let mut acc = Complex::new(0.0, 0.0);
        for j in 0..b.ncols() {
            acc += Complex::new(b[(i, j)], 0.0) * tangent[j];
        }
        acc
    })
}

fn real_vector(v: &CVector) -> crate::Vector {
    crate::Vector::from_fn(v.len(), |i, _| v[i].re)
}

fn orthonormalize(v: &Mat) -> Mat {
    let qr = v.clone().qr();
    let q = qr.q();
    // Guard against rank collapse from coincident shifts: replace
    // dependent columns by fresh orthonormal directions.
    let r_factor = qr.r();
    let k = q.ncols();
    let mut needs_fix = false;
    for i in 0..k.min(r_factor.nrows()) {
        if r_factor[(i, i)].abs() < 1e-12 * r_factor.amax().max(1e-300) {
            needs_fix = true;
        }
    }
    if !needs_fix {
        return q;
    }
    crate::numkernels::orthonormal_completion(&Mat::zeros(v.nrows(), 0))
        .columns(0, k)
        .clone_owned()
}

fn build_rom(ph: &PhSystem, v: &Mat) -> Result<PhSystem> {
    let qv = &ph.q * v;
    let qhat = symmetrize(&(v.transpose() * &qv));
    let chol = match qhat.clone().cholesky() {
        Some(c) => c,
        None => {
            return Err(Error::NotPositiveDefinite(
                "projected Hamiltonian V'QV lost definiteness".into(),
            ))
        }
    };
    // W = Q V (V'QV)^{-1}
    let w = chol.solve(&qv.transpose()).transpose();
    Ok(PhSystem {
        j: skew_part(&(w.transpose() * &ph.j * &w)),
        r: symmetrize(&(w.transpose() * &ph.r * &w)),
        q: qhat,
        g: w.transpose() * &ph.g,
        p: w.transpose() * &ph.p,
        s: ph.s.clone(),
        n: ph.n.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gramians::h2_dist_lti;
    use crate::structure::synthetic_with_dims;
    use crate::systems::validate_ph;

    fn small_fom() -> ExtendedPhSystem {
        synthetic_with_dims((3, 0, 0, 0), 1, 2024)
    }

    #[test]
    fn full_order_is_fixed_point() {
        let fom = small_fom();
        let io = fom.io();
        // Start from the mirrored poles of the model itself.
        let poles = crate::numkernels::eigenvalues(&io.a).unwrap();
        let opts = PhirkaOptions {
            initial_shifts: poles.iter().map(|l| -l.conj()).collect(),
            ..Default::default()
        };
        let rom = phirka(&fom, 3, &opts).unwrap();
        assert!(rom.converged);
        assert!(rom.iterations.unwrap() <= 2, "iterations {:?}", rom.iterations);
        let dist = h2_dist_lti(&io, &rom.rom_lti).unwrap();
        let scale = crate::gramians::h2_norm_lti(&io).unwrap();
        assert!(dist < 1e-8 * scale.max(1.0), "dist {dist}");
    }

    #[test]
    fn energy_toy_model_reduces_to_valid_ph() {
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
        let fom = ExtendedPhSystem::new(ph);
        let rom = phirka(&fom, 1, &PhirkaOptions::default()).unwrap();
        let tol = crate::systems::default_validation_tol(&rom.rom_ph.ph);
        assert!(validate_ph(&rom.rom_ph.ph, tol).is_valid());
        assert_eq!(rom.rom_lti.order(), 1);
    }

    #[test]
    fn rom_hamiltonian_is_projected_and_definite() {
        let fom = synthetic_with_dims((8, 0, 0, 0), 2, 5);
        let rom = phirka(&fom, 4, &PhirkaOptions::default()).unwrap();
        let qhat = &rom.rom_ph.ph.q;
        assert_eq!(qhat.nrows(), 4);
        assert!(crate::numkernels::min_sym_eigenvalue(qhat) > 0.0);
        // Automatic stability of the pH projection.
        assert!(rom.rom_lti.spectral_abscissa().unwrap() < 1e-10);
    }

    #[test]
    fn shift_history_is_recorded() {
        let fom = small_fom();
        let rom = phirka(&fom, 2, &PhirkaOptions::default()).unwrap();
        let hist = rom.shift_history.unwrap();
        assert!(hist.len() >= 2);
        assert_eq!(hist[0].len(), 2);
    }
}
