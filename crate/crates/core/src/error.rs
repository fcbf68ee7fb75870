//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix contains non-finite entries: {0}")]
    NonFinite(String),

    #[error("singular pencil: {0}")]
    SingularPencil(String),

    #[error("Schur iteration did not converge for a {0}x{0} matrix")]
    SchurNoConvergence(usize),

    #[error("D + D' is singular (smallest eigenvalue magnitude {0:.3e})")]
    FeedthroughSingular(f64),

    #[error("no stable invariant subspace: eigenvalue within {0:.3e} of the imaginary axis")]
    NoStableInvariantSubspace(f64),

    #[error("minimal Riccati solution is indefinite (smallest eigenvalue {0:.3e}); input is not passive")]
    IndefiniteSolution(f64),

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("X is not in the KYP feasible set (smallest eigenvalue of W(X) is {0:.3e})")]
    NotFeasible(f64),

    #[error("system is not asymptotically stable (spectral abscissa {0:.3e})")]
    Unstable(f64),

    #[error("H2 norm undefined: nonzero feedthrough (|D| = {0:.3e})")]
    NonzeroFeedthrough(f64),

    #[error("H2 distance undefined: feedthrough terms differ (|D - Dr| = {0:.3e})")]
    FeedthroughMismatch(f64),

    #[error("sI - A is singular at the requested shift")]
    SingularShift,

    #[error("time-step factorization failed (I - dt/2 A singular)")]
    StepFactorizationFailed,

    #[error("shift solve singular at sigma = {0:.6e} + {1:.6e}i")]
    ShiftSolveSingular(f64, f64),

    #[error("rank deficient: {0}")]
    RankDeficient(String),

    #[error("no interior point: every initialization candidate stays infeasible after perturbation")]
    NoInteriorPoint,

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
