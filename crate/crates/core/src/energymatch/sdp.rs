//! Plain-text export of the energy-matching problem as semidefinite
//! program data, so external solvers can cross-check the barrier method.
//!
//! The file carries the objective in its quadratic expansion over the
//! half-vectorized variable `q = vech(Qhat)`,
//! `J(q) = c + g'q + q'Hq/2`, followed by the affine constraint blocks
//! `W(q) = W0 + sum_k q_k Wk >= 0`. The format is documented in
//! `docs/formats.md`; nothing in this crate reads it back.

use super::{vech_len, EnergyMatchProblem};
use crate::kyp::kyp_matrix;
use crate::{Mat, Result};
use std::io::Write;

pub fn write_sdp_export(prob: &EnergyMatchProblem, path: &std::path::Path) -> Result<()> {
    let rom = &prob.rom_lti;
    let r = rom.order();
    let m = rom.inputs();
    let nv = vech_len(r);

    // Quadratic objective data: column k of H is vech-pullback of
    // Pr Ek Pr with Ek the k-th symmetric basis matrix.
    let mut h = Mat::zeros(nv, nv);
    for k in 0..nv {
        let mut unit = crate::Vector::zeros(nv);
        unit[k] = 1.0;
        let ek = super::vech_inv(&unit, r);
        let col = super::pullback_gradient(&((&prob.p_rom * ek * &prob.p_rom) * 0.5));
        h.set_column(k, &col);
    }
    let g = super::pullback_gradient(&(&prob.ytqy * -0.5));

    let mut out = String::new();
    out.push_str("PHMOR-SDP 1\n");
    out.push_str("# minimize c + g'q + 0.5 q'Hq over q = vech(Qhat)\n");
    out.push_str("# subject to W0 + sum_k q_k Wk >= 0 (one symmetric block)\n");
    out.push_str(&format!("dim_q {nv}\n"));
    out.push_str(&format!("block_dim {}\n", r + m));
    out.push_str(&format!("objective_constant {:.17e}\n", prob.const_term));
    out.push_str("objective_linear\n");
    for k in 0..nv {
        out.push_str(&format!("{:.17e}\n", g[k]));
    }
    out.push_str("objective_quadratic\n");
    for i in 0..nv {
        let row: Vec<String> = (0..nv).map(|j| format!("{:.17e}", h[(i, j)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }

    let zero = Mat::zeros(r, r);
    let w0 = kyp_matrix(rom, &zero);
    push_block(&mut out, "constraint_W0", &w0);
    for k in 0..nv {
        let mut unit = crate::Vector::zeros(nv);
        unit[k] = 1.0;
        let ek = super::vech_inv(&unit, r);
        let wk = kyp_matrix(rom, &ek) - &w0;
        push_block(&mut out, &format!("constraint_W{}", k + 1), &wk);
    }

    let mut file = std::fs::File::create(path)?;
    file.write_all(out.as_bytes())?;
    Ok(())
}

fn push_block(out: &mut String, name: &str, block: &Mat) {
    out.push_str(name);
    out.push('\n');
    for i in 0..block.nrows() {
        let row: Vec<String> = (0..block.ncols()).map(|j| format!("{:.17e}", block[(i, j)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
}

#[cfg(test)]
mod tests {
    use super::super::build_problem;
    use crate::systems::{ExtendedPhSystem, LtiSystem, PhSystem};
    use crate::Mat;

    #[test]
    fn export_writes_parseable_header() {
        let fom = ExtendedPhSystem::new(
            PhSystem::new(
                Mat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]),
                Mat::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]),
                Mat::identity(2, 2),
                Mat::from_column_slice(2, 1, &[6.0, 0.0]),
                Mat::zeros(2, 1),
                Mat::from_element(1, 1, 1.0),
                Mat::zeros(1, 1),
            )
            .unwrap(),
        );
        let rom = LtiSystem::new(
            Mat::from_element(1, 1, -2.0),
            Mat::from_element(1, 1, 6.0),
            Mat::from_element(1, 1, 6.0),
            Mat::from_element(1, 1, 1.0),
        )
        .unwrap();
        let prob = build_problem(&fom, &rom).unwrap();
        let dir = std::env::temp_dir().join("phmor_sdp_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("export.sdp");
        super::write_sdp_export(&prob, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("PHMOR-SDP 1"));
        assert!(text.contains("dim_q 1"));
        assert!(text.contains("block_dim 2"));
        assert!(text.contains("constraint_W1"));
        // Objective quadratic for the toy model: H = Pr^2 = 81 packed in
        // the single scalar slot => J'' = 81/2 * 2 ... the exported H is
        // the pullback 0.5*2*Pr*Pr = 40.5.
        assert!(text.contains("objective_quadratic\n4.05"));
        std::fs::remove_dir_all(&dir).ok();
    }
}
