//! C ABI for the phmor model-reduction library.
//!
//! Systems are opaque handles created by the constructors or by reading
//! PHMX1/LTIX1 files; every function returns a [`PhmorStatus`] and the
//! detailed message of the last failure is available per thread through
//! [`phmor_last_error`]. Matrices cross the boundary as row-major `f64`
//! buffers. Handles must be released with [`phmor_system_free`].

use phmor::bench_io::{
    gen_msd, gen_rcl, read_system, write_system, MsdParams, RclParams, SystemFile,
};
use phmor::energymatch::{energy_match, EnergyMatchConfig};
use phmor::gramians::{h2_dist_extended, h2_dist_lti, h2_dist_ltiqo};
use phmor::reduction::{phirka, prbt, PhirkaOptions};
use phmor::structure::minimal_realization;
use phmor::systems::{
    default_validation_tol, lti_to_ph, validate_ph, ExtendedPhSystem, LtiSystem, PhSystem,
};
use phmor::Mat;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;

/// Result codes of every FFI call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum PhmorStatus {
    Ok = 0,
    /// A pointer argument was null or a dimension was invalid.
    InvalidArgument = 1,
    /// File could not be parsed as PHMX1/LTIX1.
    Parse = 2,
    /// Filesystem failure.
    Io = 3,
    /// Numerical failure (unstable system, singular pencil, ...).
    Numeric = 4,
}

/// Selects the error system for `phmor_h2_distance`.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum PhmorErrorKind {
    Io = 0,
    Hamiltonian = 1,
    Extended = 2,
}

/// Opaque system handle: a pH septuple or a plain state-space model.
pub struct PhmorSystem {
    inner: SystemFile,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl std::fmt::Display) {
    let text = CString::new(msg.to_string()).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
}

fn fail(status: PhmorStatus, msg: impl std::fmt::Display) -> PhmorStatus {
    set_error(msg);
    status
}

fn status_of(err: &phmor::Error) -> PhmorStatus {
    match err {
        phmor::Error::Parse { .. } => PhmorStatus::Parse,
        phmor::Error::Io(_) => PhmorStatus::Io,
        phmor::Error::DimensionMismatch(_) | phmor::Error::InvalidArgument(_) => {
            PhmorStatus::InvalidArgument
        }
        _ => PhmorStatus::Numeric,
    }
}

/// Message describing the most recent failure on this thread. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn phmor_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

unsafe fn path_from(ptr_path: *const c_char) -> Result<String, PhmorStatus> {
    if ptr_path.is_null() {
        return Err(fail(PhmorStatus::InvalidArgument, "null path"));
    }
    match CStr::from_ptr(ptr_path).to_str() {
        Ok(s) => Ok(s.to_string()),
        Err(_) => Err(fail(PhmorStatus::InvalidArgument, "path is not valid UTF-8")),
    }
}

fn emit(out: *mut *mut PhmorSystem, sys: SystemFile) -> PhmorStatus {
    if out.is_null() {
        return fail(PhmorStatus::InvalidArgument, "null output handle");
    }
    let boxed = Box::new(PhmorSystem { inner: sys });
    unsafe { *out = Box::into_raw(boxed) };
    PhmorStatus::Ok
}

unsafe fn borrow<'a>(sys: *const PhmorSystem) -> Result<&'a PhmorSystem, PhmorStatus> {
    sys.as_ref()
        .ok_or_else(|| fail(PhmorStatus::InvalidArgument, "null system handle"))
}

/// Reads a PHMX1 or LTIX1 file into a new handle.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn phmor_system_read(
    path: *const c_char,
    out: *mut *mut PhmorSystem,
) -> PhmorStatus {
    let path = match path_from(path) {
        Ok(p) => p,
        Err(s) => return s,
    };
    match read_system(Path::new(&path)) {
        Ok(sys) => emit(out, sys),
        Err(e) => fail(status_of(&e), e),
    }
}

/// Writes the system in its native text format.
///
/// # Safety
/// `sys` must be a live handle, `path` a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn phmor_system_write(
    sys: *const PhmorSystem,
    path: *const c_char,
) -> PhmorStatus {
    let sys = match borrow(sys) {
        Ok(s) => s,
        Err(st) => return st,
    };
    let path = match path_from(path) {
        Ok(p) => p,
        Err(st) => return st,
    };
    match write_system(&sys.inner, Path::new(&path)) {
        Ok(()) => PhmorStatus::Ok,
        Err(e) => fail(status_of(&e), e),
    }
}

/// Releases a handle. Null is allowed.
///
/// # Safety
/// `sys` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn phmor_system_free(sys: *mut PhmorSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Builds a pH system from row-major blocks `J R Q G P S N`.
///
/// # Safety
/// Block pointers must reference buffers of the documented sizes:
/// `J,R,Q` are `n*n`, `G,P` are `n*m`, `S,N` are `m*m`.
#[no_mangle]
pub unsafe extern "C" fn phmor_system_from_ph(
    n: usize,
    m: usize,
    j: *const f64,
    r: *const f64,
    q: *const f64,
    g: *const f64,
    p: *const f64,
    s: *const f64,
    nmat: *const f64,
    out: *mut *mut PhmorSystem,
) -> PhmorStatus {
    let blocks = [
        (j, n, n),
        (r, n, n),
        (q, n, n),
        (g, n, m),
        (p, n, m),
        (s, m, m),
        (nmat, m, m),
    ];
    let mut mats = Vec::with_capacity(7);
    for (ptr_block, rows, cols) in blocks {
        if ptr_block.is_null() {
            return fail(PhmorStatus::InvalidArgument, "null matrix block");
        }
        let slice = std::slice::from_raw_parts(ptr_block, rows * cols);
        mats.push(Mat::from_row_slice(rows, cols, slice));
    }
    let nm = mats.pop().unwrap();
    let sm = mats.pop().unwrap();
    let pm = mats.pop().unwrap();
    let gm = mats.pop().unwrap();
    let qm = mats.pop().unwrap();
    let rm = mats.pop().unwrap();
    let jm = mats.pop().unwrap();
    match PhSystem::new(jm, rm, qm, gm, pm, sm, nm) {
        Ok(ph) => emit(out, SystemFile::Ph(ExtendedPhSystem::new(ph))),
        Err(e) => fail(status_of(&e), e),
    }
}

/// Mass-spring-damper chain generator with scalar coefficients.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn phmor_gen_msd(
    n_masses: usize,
    io_dim: usize,
    mass: f64,
    spring: f64,
    damper: f64,
    out: *mut *mut PhmorSystem,
) -> PhmorStatus {
    let params = MsdParams {
        n_masses,
        masses: vec![mass],
        spring_consts: vec![spring],
        damper_consts: vec![damper],
        io_dim,
    };
    match gen_msd(&params) {
        Ok(sys) => emit(out, SystemFile::Ph(sys)),
        Err(e) => fail(status_of(&e), e),
    }
}

/// RCL ladder generator.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn phmor_gen_rcl(
    n_cells: usize,
    r_val: f64,
    c_val: f64,
    l_val: f64,
    out: *mut *mut PhmorSystem,
) -> PhmorStatus {
    match gen_rcl(&RclParams { n_cells, r_val, c_val, l_val }) {
        Ok(sys) => emit(out, SystemFile::Ph(sys)),
        Err(e) => fail(status_of(&e), e),
    }
}

/// State dimension.
///
/// # Safety
/// `sys` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn phmor_system_order(sys: *const PhmorSystem) -> usize {
    borrow(sys).map(|s| s.inner.order()).unwrap_or(0)
}

/// Input dimension.
///
/// # Safety
/// `sys` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn phmor_system_inputs(sys: *const PhmorSystem) -> usize {
    borrow(sys)
        .map(|s| match &s.inner {
            SystemFile::Ph(p) => p.inputs(),
            SystemFile::Lti(l) => l.inputs(),
        })
        .unwrap_or(0)
}

/// Nonzero when the handle carries a pH septuple.
///
/// # Safety
/// `sys` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn phmor_system_is_ph(sys: *const PhmorSystem) -> i32 {
    borrow(sys)
        .map(|s| matches!(s.inner, SystemFile::Ph(_)) as i32)
        .unwrap_or(0)
}

/// Checks the pH structure conditions. `tol <= 0` picks the default.
/// `*valid_out` receives 1 when all conditions hold.
///
/// # Safety
/// `sys` must be a live pH handle, `valid_out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn phmor_validate(
    sys: *const PhmorSystem,
    tol: f64,
    valid_out: *mut i32,
) -> PhmorStatus {
    let sys = match borrow(sys) {
        Ok(s) => s,
        Err(st) => return st,
    };
    if valid_out.is_null() {
        return fail(PhmorStatus::InvalidArgument, "null output pointer");
    }
    let ph = match sys.inner.ph() {
        Ok(p) => p,
        Err(e) => return fail(status_of(&e), e),
    };
    let tol = if tol > 0.0 { tol } else { default_validation_tol(&ph.ph) };
    let report = validate_ph(&ph.ph, tol);
    if !report.is_valid() {
        set_error(report.to_string());
    }
    *valid_out = report.is_valid() as i32;
    PhmorStatus::Ok
}

/// Copies a named matrix block out of the handle. Valid names: pH blocks
/// `J R Q G P S N` and state-space views `A B C D`. Call with a null
/// buffer to query dimensions; otherwise `buf` must hold `rows * cols`
/// doubles (row-major).
///
/// # Safety
/// Pointers must be valid; `buf`, when non-null, must hold at least
/// `buf_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn phmor_get_matrix(
    sys: *const PhmorSystem,
    name: *const c_char,
    buf: *mut f64,
    buf_len: usize,
    rows_out: *mut usize,
    cols_out: *mut usize,
) -> PhmorStatus {
    let sys = match borrow(sys) {
        Ok(s) => s,
        Err(st) => return st,
    };
    let name = match path_from(name) {
        Ok(n) => n,
        Err(st) => return st,
    };
    let io = sys.inner.io();
    let mat: Mat = match (name.as_str(), &sys.inner) {
        ("A", _) => io.a,
        ("B", _) => io.b,
        ("C", _) => io.c,
        ("D", _) => io.d,
        ("J", SystemFile::Ph(p)) => p.ph.j.clone(),
        ("R", SystemFile::Ph(p)) => p.ph.r.clone(),
        ("Q", SystemFile::Ph(p)) => p.ph.q.clone(),
        ("G", SystemFile::Ph(p)) => p.ph.g.clone(),
        ("P", SystemFile::Ph(p)) => p.ph.p.clone(),
        ("S", SystemFile::Ph(p)) => p.ph.s.clone(),
        ("N", SystemFile::Ph(p)) => p.ph.n.clone(),
        _ => return fail(PhmorStatus::InvalidArgument, format!("no block named '{name}'")),
    };
    if !rows_out.is_null() {
        *rows_out = mat.nrows();
    }
    if !cols_out.is_null() {
        *cols_out = mat.ncols();
    }
    if buf.is_null() {
        return PhmorStatus::Ok;
    }
    let needed = mat.nrows() * mat.ncols();
    if buf_len < needed {
        return fail(
            PhmorStatus::InvalidArgument,
            format!("buffer holds {buf_len} entries, need {needed}"),
        );
    }
    let out = std::slice::from_raw_parts_mut(buf, needed);
    for i in 0..mat.nrows() {
        for jx in 0..mat.ncols() {
            out[i * mat.ncols() + jx] = mat[(i, jx)];
        }
    }
    PhmorStatus::Ok
}

/// Structure-preserving minimal realization at relative rank tolerance
/// `tol` (`<= 0` picks `1e-12`).
///
/// # Safety
/// `sys` must be a live pH handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn phmor_minreal(
    sys: *const PhmorSystem,
    tol: f64,
    out: *mut *mut PhmorSystem,
) -> PhmorStatus {
    let sys = match borrow(sys) {
        Ok(s) => s,
        Err(st) => return st,
    };
    let ph = match sys.inner.ph() {
        Ok(p) => p.clone(),
        Err(e) => return fail(status_of(&e), e),
    };
    let tol = if tol > 0.0 { tol } else { 1e-12 };
    match minimal_realization(&ph, tol) {
        Ok(minimal) => emit(out, SystemFile::Ph(minimal)),
        Err(e) => fail(status_of(&e), e),
    }
}

/// Positive-real balanced truncation to order `r`.
///
/// # Safety
/// `sys` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn phmor_reduce_prbt(
    sys: *const PhmorSystem,
    r: usize,
    out: *mut *mut PhmorSystem,
) -> PhmorStatus {
    let sys = match borrow(sys) {
        Ok(s) => s,
        Err(st) => return st,
    };
    match prbt(&sys.inner.io(), r) {
        Ok(rom) => emit(out, SystemFile::Ph(rom.rom_ph)),
        Err(e) => fail(status_of(&e), e),
    }
}

/// pH-IRKA reduction to order `r` with seeded tangent directions.
///
/// # Safety
/// `sys` must be a live pH handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn phmor_reduce_phirka(
    sys: *const PhmorSystem,
    r: usize,
    seed: u64,
    out: *mut *mut PhmorSystem,
) -> PhmorStatus {
    let sys = match borrow(sys) {
        Ok(s) => s,
        Err(st) => return st,
    };
    let ph = match sys.inner.ph() {
        Ok(p) => p.clone(),
        Err(e) => return fail(status_of(&e), e),
    };
    let opts = PhirkaOptions { seed, ..Default::default() };
    match phirka(&ph, r, &opts) {
        Ok(rom) => emit(out, SystemFile::Ph(rom.rom_ph)),
        Err(e) => fail(status_of(&e), e),
    }
}

/// Energy matching: re-selects the Hamiltonian of `rom` to minimize the
/// Hamiltonian-dynamic H2 error against `fom`, leaving the io map
/// untouched. Writes the squared error to `cost_out` when non-null.
///
/// # Safety
/// `fom` must be a live pH handle, `rom` a live handle, `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn phmor_energy_match(
    fom: *const PhmorSystem,
    rom: *const PhmorSystem,
    out: *mut *mut PhmorSystem,
    cost_out: *mut f64,
) -> PhmorStatus {
    let fom = match borrow(fom) {
        Ok(s) => s,
        Err(st) => return st,
    };
    let rom = match borrow(rom) {
        Ok(s) => s,
        Err(st) => return st,
    };
    let fom_ph = match fom.inner.ph() {
        Ok(p) => p.clone(),
        Err(e) => return fail(status_of(&e), e),
    };
    let rom_lti: LtiSystem = rom.inner.io();
    let result = match energy_match(&fom_ph, &rom_lti, &EnergyMatchConfig::default()) {
        Ok(r) => r,
        Err(e) => return fail(status_of(&e), e),
    };
    if !cost_out.is_null() {
        *cost_out = result.cost;
    }
    let w = phmor::kyp::kyp_matrix(&result.rom_effective, &result.q_opt);
    let feas_tol = 10.0 * phmor::kyp::default_feasibility_tol(&w);
    match lti_to_ph(&result.rom_effective, &result.q_opt, feas_tol) {
        Ok(ph) => emit(out, SystemFile::Ph(ExtendedPhSystem::new(ph))),
        Err(e) => fail(status_of(&e), e),
    }
}

/// H2 distance between two systems.
///
/// # Safety
/// Handles must be live; `dist_out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn phmor_h2_distance(
    fom: *const PhmorSystem,
    rom: *const PhmorSystem,
    which: PhmorErrorKind,
    dist_out: *mut f64,
) -> PhmorStatus {
    let fom = match borrow(fom) {
        Ok(s) => s,
        Err(st) => return st,
    };
    let rom = match borrow(rom) {
        Ok(s) => s,
        Err(st) => return st,
    };
    if dist_out.is_null() {
        return fail(PhmorStatus::InvalidArgument, "null output pointer");
    }
    let value = match which {
        PhmorErrorKind::Io => h2_dist_lti(&fom.inner.io(), &rom.inner.io()),
        PhmorErrorKind::Hamiltonian => {
            let f = fom.inner.ph().map(|p| p.ham());
            let r = rom.inner.ph().map(|p| p.ham());
            match (f, r) {
                (Ok(f), Ok(r)) => h2_dist_ltiqo(&f, &r),
                (Err(e), _) | (_, Err(e)) => Err(e),
            }
        }
        PhmorErrorKind::Extended => {
            let f = fom.inner.ph().cloned();
            let r = rom.inner.ph().cloned();
            match (f, r) {
                (Ok(f), Ok(r)) => h2_dist_extended(&f, &r),
                (Err(e), _) | (_, Err(e)) => Err(e),
            }
        }
    };
    match value {
        Ok(v) => {
            *dist_out = v;
            PhmorStatus::Ok
        }
        Err(e) => fail(status_of(&e), e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    #[test]
    fn gen_query_and_free() {
        unsafe {
            let mut sys: *mut PhmorSystem = ptr::null_mut();
            let st = phmor_gen_msd(5, 1, 4.0, 4.0, 1.0, &mut sys);
            assert!(st == PhmorStatus::Ok);
            assert_eq!(phmor_system_order(sys), 10);
            assert_eq!(phmor_system_inputs(sys), 1);
            assert_eq!(phmor_system_is_ph(sys), 1);
            let mut valid = 0i32;
            assert!(phmor_validate(sys, 0.0, &mut valid) == PhmorStatus::Ok);
            assert_eq!(valid, 1);
            phmor_system_free(sys);
        }
    }

    #[test]
    fn matrix_copy_out_round_trips() {
        unsafe {
            let mut sys: *mut PhmorSystem = ptr::null_mut();
            assert!(phmor_gen_rcl(3, 1.0, 1.0, 1.0, &mut sys) == PhmorStatus::Ok);
            let name = CString::new("A").unwrap();
            let (mut rows, mut cols) = (0usize, 0usize);
            assert!(
                phmor_get_matrix(sys, name.as_ptr(), ptr::null_mut(), 0, &mut rows, &mut cols)
                    == PhmorStatus::Ok
            );
            assert_eq!((rows, cols), (6, 6));
            let mut buf = vec![0.0f64; rows * cols];
            assert!(
                phmor_get_matrix(sys, name.as_ptr(), buf.as_mut_ptr(), buf.len(), &mut rows, &mut cols)
                    == PhmorStatus::Ok
            );
            assert!(buf.iter().any(|&x| x != 0.0));
            phmor_system_free(sys);
        }
    }

    #[test]
    fn null_arguments_are_rejected_with_message() {
        unsafe {
            let st = phmor_system_read(ptr::null(), ptr::null_mut());
            assert!(st == PhmorStatus::InvalidArgument);
            let msg = CStr::from_ptr(phmor_last_error());
            assert!(!msg.to_bytes().is_empty());
        }
    }
}
