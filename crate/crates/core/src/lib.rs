//! Structure-preserving model order reduction for passive and
//! port-Hamiltonian (pH) linear time-invariant systems.
//!
//! A pH system carries, next to its input-output map, a Hamiltonian
//! `H(x) = x' Q x / 2` that evolves along trajectories. Classical
//! reduction methods approximate the input-output map only; this crate
//! treats the pair jointly:
//!
//! * [`systems`]: LTI, pH, extended pH and quadratic-output system types
//!   with validation, factorization and time stepping,
//! * [`numkernels`]: dense Lyapunov/Sylvester/Riccati solvers with an
//!   ordered real Schur decomposition and a controllability staircase,
//! * [`gramians`]: Gramians and H2 norms/distances for linear and
//!   quadratic-output dynamics,
//! * [`kyp`]: the KYP inequality, extremal solutions, passivity checks,
//! * [`structure`]: the structure-preserving Kalman-like decomposition
//!   and minimal realization of extended pH systems,
//! * [`reduction`]: positive-real balanced truncation and pH-IRKA,
//! * [`energymatch`]: re-selection of the reduced Hamiltonian over the
//!   KYP feasible set by a log-det barrier method, leaving the
//!   input-output map untouched,
//! * [`bench_io`]: benchmark generators, the PHMX1/LTIX1 file format
//!   and CSV result emission,
//! * [`cli`]: the command-line front end (`phmor` binary).

pub mod bench_io;
pub mod cli;
pub mod energymatch;
pub mod error;
pub mod gramians;
pub mod kyp;
pub mod numkernels;
pub mod reduction;
pub mod structure;
pub mod systems;

pub use error::{Error, Result};

/// Dense real matrix used throughout the crate.
pub type Mat = nalgebra::DMatrix<f64>;
/// Dense real column vector.
pub type Vector = nalgebra::DVector<f64>;
/// Dense complex matrix.
pub type CMat = nalgebra::DMatrix<nalgebra::Complex<f64>>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<nalgebra::Complex<f64>>;
