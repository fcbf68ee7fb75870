//! The PHMX1/LTIX1 plain-text system format.
//!
//! ```text
//! PHMX1 <n> <m>
//! J
//! <n rows of n decimals>
//! R
//! ...          (blocks J R Q G P S N)
//! ```
//!
//! LTIX1 files carry the blocks A B C D with header `LTIX1 <n> <m> <p>`.
//! Values are written with 17 significant digits, which round-trips f64
//! exactly.

use crate::systems::{ExtendedPhSystem, LtiSystem, PhSystem};
use crate::{Error, Mat, Result};
use std::io::Write;
use std::path::Path;

/// A system file is either a pH septuple or a plain state-space model.
#[derive(Debug, Clone)]
pub enum SystemFile {
    Ph(ExtendedPhSystem),
    Lti(LtiSystem),
}

impl SystemFile {
    pub fn order(&self) -> usize {
        match self {
            SystemFile::Ph(s) => s.order(),
            SystemFile::Lti(s) => s.order(),
        }
    }

    /// The io view, expanding pH septuples.
    pub fn io(&self) -> LtiSystem {
        match self {
            SystemFile::Ph(s) => s.io(),
            SystemFile::Lti(s) => s.clone(),
        }
    }

    /// Extended pH view; errors for plain LTI files.
    pub fn ph(&self) -> Result<&ExtendedPhSystem> {
        match self {
            SystemFile::Ph(s) => Ok(s),
            SystemFile::Lti(_) => Err(Error::InvalidArgument(
                "file holds a plain state-space model, not a pH system".into(),
            )),
        }
    }
}

fn fmt_value(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_block(out: &mut String, name: &str, m: &Mat) {
    out.push_str(name);
    out.push('\n');
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| fmt_value(m[(i, j)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
}

/// Serializes a system to its text form.
pub fn serialize_system(sys: &SystemFile) -> String {
    let mut out = String::new();
    match sys {
        SystemFile::Ph(eph) => {
            let ph = &eph.ph;
            out.push_str(&format!("PHMX1 {} {}\n", ph.order(), ph.inputs()));
            for (name, m) in [
                ("J", &ph.j),
                ("R", &ph.r),
                ("Q", &ph.q),
                ("G", &ph.g),
                ("P", &ph.p),
                ("S", &ph.s),
                ("N", &ph.n),
            ] {
                write_block(&mut out, name, m);
            }
        }
        SystemFile::Lti(lti) => {
            out.push_str(&format!(
                "LTIX1 {} {} {}\n",
                lti.order(),
                lti.inputs(),
                lti.outputs()
            ));
            for (name, m) in [("A", &lti.a), ("B", &lti.b), ("C", &lti.c), ("D", &lti.d)] {
                write_block(&mut out, name, m);
            }
        }
    }
    out
}

pub fn write_system(sys: &SystemFile, path: &Path) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(serialize_system(sys).as_bytes())?;
    Ok(())
}

struct Parser<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Parser<'a> {
    fn next_content_line(&mut self) -> Option<(usize, &'a str)> {
        for (idx, line) in self.lines.by_ref() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            return Some((idx + 1, trimmed));
        }
        None
    }

    fn expect_block(&mut self, name: &str, rows: usize, cols: usize) -> Result<Mat> {
        let (line_no, header) = self.next_content_line().ok_or(Error::Parse {
            line: 0,
            col: 0,
            msg: format!("unexpected end of file, expected block {name}"),
        })?;
        if header != name {
            return Err(Error::Parse {
                line: line_no,
                col: 1,
                msg: format!("expected block header '{name}', found '{header}'"),
            });
        }
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            let (line_no, line) = self.next_content_line().ok_or(Error::Parse {
                line: 0,
                col: 0,
                msg: format!("unexpected end of file in block {name}, row {}", i + 1),
            })?;
            let mut count = 0usize;
            for (j, tok) in line.split_whitespace().enumerate() {
                if j >= cols {
                    return Err(Error::Parse {
                        line: line_no,
                        col: j + 1,
                        msg: format!("block {name}: row has more than {cols} entries"),
                    });
                }
                let val: f64 = tok.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    col: j + 1,
                    msg: format!("block {name}: cannot parse '{tok}' as a number"),
                })?;
                m[(i, j)] = val;
                count += 1;
            }
            if count != cols {
                return Err(Error::Parse {
                    line: line_no,
                    col: count + 1,
                    msg: format!("block {name}: expected {cols} entries, found {count}"),
                });
            }
        }
        Ok(m)
    }
}

/// Parses the text form of a system file.
pub fn parse_system(text: &str) -> Result<SystemFile> {
    let mut parser = Parser { lines: text.lines().enumerate() };
    let (line_no, header) = parser.next_content_line().ok_or(Error::Parse {
        line: 1,
        col: 1,
        msg: "empty file".into(),
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let parse_dim = |tok: &str, what: &str| -> Result<usize> {
        tok.parse().map_err(|_| Error::Parse {
            line: line_no,
            col: 1,
            msg: format!("cannot parse {what} '{tok}'"),
        })
    };
    match fields.first().copied() {
        Some("PHMX1") => {
            if fields.len() != 3 {
                return Err(Error::Parse {
                    line: line_no,
                    col: 1,
                    msg: "PHMX1 header needs exactly 'PHMX1 n m'".into(),
                });
            }
            let n = parse_dim(fields[1], "state dimension")?;
            let m = parse_dim(fields[2], "input dimension")?;
            let j = parser.expect_block("J", n, n)?;
            let r = parser.expect_block("R", n, n)?;
            let q = parser.expect_block("Q", n, n)?;
            let g = parser.expect_block("G", n, m)?;
            let p = parser.expect_block("P", n, m)?;
            let s = parser.expect_block("S", m, m)?;
            let nn = parser.expect_block("N", m, m)?;
            let ph = PhSystem::new(j, r, q, g, p, s, nn).map_err(|e| match e {
                Error::DimensionMismatch(msg) => Error::Parse { line: line_no, col: 1, msg },
                other => other,
            })?;
            Ok(SystemFile::Ph(ExtendedPhSystem::new(ph)))
        }
        Some("LTIX1") => {
            if fields.len() != 4 {
                return Err(Error::Parse {
                    line: line_no,
                    col: 1,
                    msg: "LTIX1 header needs exactly 'LTIX1 n m p'".into(),
                });
            }
            let n = parse_dim(fields[1], "state dimension")?;
            let m = parse_dim(fields[2], "input dimension")?;
            let p = parse_dim(fields[3], "output dimension")?;
            let a = parser.expect_block("A", n, n)?;
            let b = parser.expect_block("B", n, m)?;
            let c = parser.expect_block("C", p, n)?;
            let d = parser.expect_block("D", p, m)?;
            let lti = LtiSystem::new(a, b, c, d).map_err(|e| match e {
                Error::DimensionMismatch(msg) => Error::Parse { line: line_no, col: 1, msg },
                other => other,
            })?;
            Ok(SystemFile::Lti(lti))
        }
        _ => Err(Error::Parse {
            line: line_no,
            col: 1,
            msg: format!("unknown format tag '{}'", fields.first().unwrap_or(&"")),
        }),
    }
}

pub fn read_system(path: &Path) -> Result<SystemFile> {
    let text = std::fs::read_to_string(path)?;
    parse_system(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> SystemFile {
        SystemFile::Ph(ExtendedPhSystem::new(
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
        ))
    }

    #[test]
    fn round_trip_is_exact() {
        let sys = toy();
        let text = serialize_system(&sys);
        let back = parse_system(&text).unwrap();
        match (sys, back) {
            (SystemFile::Ph(a), SystemFile::Ph(b)) => assert_eq!(a.ph, b.ph),
            _ => panic!("format tag changed"),
        }
    }

    #[test]
    fn round_trip_random_bits() {
        let mut state = 0xabcdefu64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            f64::from_bits((state >> 2) | 0x3ff0000000000000) - 1.5
        };
        let a = Mat::from_fn(3, 3, |_, _| next());
        let b = Mat::from_fn(3, 2, |_, _| next());
        let c = Mat::from_fn(1, 3, |_, _| next());
        let d = Mat::from_fn(1, 2, |_, _| next());
        let sys = SystemFile::Lti(LtiSystem::new(a.clone(), b, c, d).unwrap());
        let text = serialize_system(&sys);
        let back = parse_system(&text).unwrap();
        match back {
            SystemFile::Lti(l) => {
                // Bit-exact round trip at 17 significant digits.
                assert!(l
                    .a
                    .iter()
                    .zip(a.iter())
                    .all(|(x, y)| x.to_bits() == y.to_bits()));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn truncated_file_is_a_parse_error() {
        let sys = toy();
        let text = serialize_system(&sys);
        let cut: String = text.lines().take(5).collect::<Vec<_>>().join("\n");
        match parse_system(&cut) {
            Err(Error::Parse { .. }) => {}
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn bad_number_reports_position() {
        let text = "PHMX1 1 1\nJ\n0.0\nR\nnot_a_number\nQ\n1\nG\n1\nP\n0\nS\n0\nN\n0\n";
        match parse_system(text) {
            Err(Error::Parse { line, col, .. }) => {
                assert_eq!(line, 5);
                assert_eq!(col, 1);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
