//! CSV emission for error-versus-order sweeps.

use crate::Result;
use std::io::Write;
use std::path::Path;

/// One sweep record. Column order is part of the external contract:
/// `r, h2_io_abs, h2_io_rel, h2_ham_abs, h2_ham_rel, wall_time_s`.
#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub r: usize,
    pub h2_io_abs: f64,
    pub h2_io_rel: f64,
    pub h2_ham_abs: f64,
    pub h2_ham_rel: f64,
    pub wall_time_s: f64,
}

pub const SWEEP_HEADER: &str = "r,h2_io_abs,h2_io_rel,h2_ham_abs,h2_ham_rel,wall_time_s";

pub fn write_results_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{:.12e},{:.12e},{:.12e},{:.12e},{:.6}\n",
            row.r, row.h2_io_abs, row.h2_io_rel, row.h2_ham_abs, row.h2_ham_rel, row.wall_time_s
        ));
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(out.as_bytes())?;
    Ok(())
}
