use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid norm: {0}")]
    InvalidNorm(String),

    #[error(
        "dual norm maximization did not converge after {iterations} iterations \
         (best value {best}, tangential residual {residual:e})"
    )]
    NonConvergence {
        iterations: usize,
        best: f64,
        residual: f64,
    },

    #[error("Legendre certificate undefined for the zero covector")]
    ZeroCovector,

    #[error("Hessian of F*^2/2 is not positive definite at sample {sample:?} (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite {
        sample: Vec<f64>,
        min_eigenvalue: f64,
    },

    #[error(
        "Monte Carlo relative standard error {relative_error:e} exceeds tolerance {tolerance:e}"
    )]
    MonteCarloTolerance { relative_error: f64, tolerance: f64 },

    #[error("integrand is not integrable: {0}")]
    NonIntegrable(String),

    #[error("declared decay class does not match the profile: {0}")]
    DecayMismatch(String),

    #[error("quadrature tolerance not met: value {value}, error estimate {error:e}, requested {requested:e}")]
    ToleranceNotMet {
        value: f64,
        error: f64,
        requested: f64,
    },

    #[error("non-finite evaluation: {0}")]
    NonFinite(String),

    #[error("inadmissible exponent triple: violates {0}")]
    Inadmissible(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}
