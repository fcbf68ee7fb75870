//! Passivity- and structure-preserving reducers producing order-r
//! surrogate models: positive-real balanced truncation and the
//! interpolatory pH-IRKA iteration.

mod phirka;
mod prbt;

pub use phirka::{phirka, PhirkaOptions};
pub use prbt::prbt;

use crate::systems::{ExtendedPhSystem, LtiSystem};
use nalgebra::Complex;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodTag {
    Prbt,
    Phirka,
}

impl std::fmt::Display for MethodTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MethodTag::Prbt => write!(f, "prbt"),
            MethodTag::Phirka => write!(f, "phirka"),
        }
    }
}

/// A reduced-order model in both its pH factorization and its plain
/// state-space form. `rom_lti` carries the authoritative io data; the
/// factorization reproduces it up to roundoff.
#[derive(Debug, Clone)]
pub struct RomResult {
    pub rom_ph: ExtendedPhSystem,
    pub rom_lti: LtiSystem,
    pub method: MethodTag,
    /// Iterations used (pH-IRKA).
    pub iterations: Option<usize>,
    /// Shift sets per iteration (pH-IRKA).
    pub shift_history: Option<Vec<Vec<Complex<f64>>>>,
    /// All positive-real characteristic values, descending (PRBT).
    pub characteristic_values: Option<Vec<f64>>,
    /// False when an iteration limit was hit; the last iterate is still
    /// returned.
    pub converged: bool,
    /// Artificial feedthrough added to make the Riccati equations
    /// solvable, if any.
    pub feedthrough_eps: Option<f64>,
}
