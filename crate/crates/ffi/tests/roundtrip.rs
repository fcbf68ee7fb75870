//! Exercises the C ABI end to end: generate, write, read back, reduce,
//! match and measure through the exported functions only.

use phmor_ffi::*;
use std::ffi::CString;
use std::ptr;

fn tmpdir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("phmor_ffi_{tag}_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn generate_write_read_reduce_match() {
    unsafe {
        let dir = tmpdir("pipeline");
        let mut fom: *mut PhmorSystem = ptr::null_mut();
        assert!(phmor_gen_msd(10, 2, 4.0, 4.0, 1.0, &mut fom) == PhmorStatus::Ok);
        assert_eq!(phmor_system_order(fom), 20);

        // Round trip through the file format.
        let path = CString::new(dir.join("fom.phmx").to_str().unwrap()).unwrap();
        assert!(phmor_system_write(fom, path.as_ptr()) == PhmorStatus::Ok);
        let mut fom2: *mut PhmorSystem = ptr::null_mut();
        assert!(phmor_system_read(path.as_ptr(), &mut fom2) == PhmorStatus::Ok);
        assert_eq!(phmor_system_order(fom2), 20);
        assert_eq!(phmor_system_is_ph(fom2), 1);

        // Minimal realization, then reduction.
        let mut minimal: *mut PhmorSystem = ptr::null_mut();
        assert!(phmor_minreal(fom2, 1e-12, &mut minimal) == PhmorStatus::Ok);
        let n_min = phmor_system_order(minimal);
        assert!(n_min <= 20 && n_min > 0);

        let mut rom: *mut PhmorSystem = ptr::null_mut();
        assert!(phmor_reduce_prbt(minimal, 4, &mut rom) == PhmorStatus::Ok);
        assert_eq!(phmor_system_order(rom), 4);

        // Energy matching improves or keeps the Hamiltonian error.
        let mut before = f64::NAN;
        assert!(
            phmor_h2_distance(minimal, rom, PhmorErrorKind::Hamiltonian, &mut before)
                == PhmorStatus::Ok
        );
        let mut matched: *mut PhmorSystem = ptr::null_mut();
        let mut cost = f64::NAN;
        assert!(phmor_energy_match(minimal, rom, &mut matched, &mut cost) == PhmorStatus::Ok);
        assert!(cost.is_finite());
        assert!(cost.max(0.0).sqrt() <= before * (1.0 + 1e-9) + 1e-12);

        let mut valid = 0i32;
        assert!(phmor_validate(matched, 0.0, &mut valid) == PhmorStatus::Ok);
        assert_eq!(valid, 1);

        phmor_system_free(fom);
        phmor_system_free(fom2);
        phmor_system_free(minimal);
        phmor_system_free(rom);
        phmor_system_free(matched);
        std::fs::remove_dir_all(&dir).ok();
    }
}

#[test]
fn parse_failure_reports_through_status_and_message() {
    unsafe {
        let dir = tmpdir("badparse");
        let bad = dir.join("bad.phmx");
        std::fs::write(&bad, "PHMX1 2 1\nJ\nnot_numbers here\n").unwrap();
        let path = CString::new(bad.to_str().unwrap()).unwrap();
        let mut sys: *mut PhmorSystem = ptr::null_mut();
        let st = phmor_system_read(path.as_ptr(), &mut sys);
        assert!(st == PhmorStatus::Parse);
        let msg = std::ffi::CStr::from_ptr(phmor_last_error());
        assert!(msg.to_string_lossy().contains("line"));
        std::fs::remove_dir_all(&dir).ok();
    }
}

#[test]
fn header_file_is_generated_with_the_exported_surface() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/phmor.h");
    let text = std::fs::read_to_string(header).expect("generated header");
    for symbol in [
        "phmor_system_read",
        "phmor_system_write",
        "phmor_system_free",
        "phmor_gen_msd",
        "phmor_gen_rcl",
        "phmor_minreal",
        "phmor_reduce_prbt",
        "phmor_reduce_phirka",
        "phmor_energy_match",
        "phmor_h2_distance",
        "phmor_get_matrix",
        "phmor_last_error",
        "PHMOR_STATUS_OK",
    ] {
        assert!(text.contains(symbol), "header misses {symbol}");
    }
}
