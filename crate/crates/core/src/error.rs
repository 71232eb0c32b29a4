use thiserror::Error;

/// Errors produced by the solvers and the coherence pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {what} = {value}")]
    Domain { what: &'static str, value: f64 },

    /// A parameter set violates a type invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A quadrature or root search did not converge.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// The time stepper produced a non-finite value.
    #[error("solver diverged at step {step} (t = {t})")]
    Divergence { step: usize, t: f64 },

    /// Two routes to the same quantity disagree beyond roundoff.
    #[error("internal consistency violated: {0}")]
    Consistency(String),

    /// A propagated covariance matrix breaks the uncertainty relation.
    #[error("uncertainty relation violated: det V = {det}")]
    Physicality { det: f64 },

    /// A truncated Fock-space state lost too much weight above the cutoff.
    #[error("Fock truncation leakage {leakage:e} at cutoff {cutoff}; raise the cutoff")]
    Truncation { cutoff: usize, leakage: f64 },

    /// A steady-state quantity needs a localized mode that does not exist.
    #[error("no localized mode below the continuum for this bath")]
    NoLocalizedMode,

    /// Root bracketing failed.
    #[error("analysis error: {0}")]
    Analysis(String),
}

pub type Result<T> = std::result::Result<T, Error>;
