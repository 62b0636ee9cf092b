//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The mean-field fixed-point system is singular. Only possible when the
    /// drift matrix sits exactly on a stability boundary.
    #[error("steady-state fixed point is singular (parameters on a stability boundary)")]
    SingularSteadyState,

    /// The Kronecker-sum Lyapunov system is singular (marginally stable drift).
    #[error("Lyapunov equation has no unique solution (marginally stable drift matrix)")]
    NoUniqueSolution,

    #[error("eigenvalue computation produced non-finite values")]
    EigenvalueFailure,

    #[error("symplectic eigenvalues failed to pair: spread {spread:e} exceeds tolerance {tol:e}")]
    PairingFailure { spread: f64, tol: f64 },

    #[error("matrix asymmetry {asym:e} exceeds tolerance {tol:e}")]
    NotSymmetric { asym: f64, tol: f64 },

    #[error("integration budget of {steps} steps exhausted (unstable or near-marginal drift)")]
    StepBudgetExceeded { steps: usize },

    #[error("mode index {index} out of range for a {modes}-mode state")]
    ModeIndex { index: usize, modes: usize },

    #[error("quadrature index {index} out of range for dimension {dim}")]
    QuadratureIndex { index: usize, dim: usize },

    #[error("variance must be positive, got {0:e}")]
    NonPositiveVariance(f64),

    #[error("resonance locus undefined: delta1 * delta2 = 0")]
    UndefinedLocus,

    #[error("unknown figure preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}
