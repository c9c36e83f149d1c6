use thiserror::Error;

/// Error type shared by every module in the crate.
///
/// Display strings start with the invariant name so that CLI diagnostics
/// and logs identify the violated contract without extra context.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GalError {
    #[error("NonSymmetric: max |sigma[i][j] - sigma[j][i]| = {max_abs_diff:e} exceeds tolerance {tol:e}")]
    NonSymmetric { max_abs_diff: f64, tol: f64 },

    #[error("NotPsd: {0}")]
    NotPsd(String),

    #[error("NonPositiveShape: shape parameter must be > 0, got {0}")]
    NonPositiveShape(f64),

    #[error("DimensionMismatch: {0}")]
    DimensionMismatch(String),

    #[error("SingularSigma: operation requires a strictly positive definite sigma")]
    SingularSigma,

    #[error("IncompatibleParams: {0}")]
    IncompatibleParams(String),

    #[error("DomainError: {0}")]
    Domain(String),

    #[error("EmptyGrid: at least one evaluation point is required")]
    EmptyGrid,

    #[error("TooFewSamples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("QuadratureNonConvergence: {0}")]
    QuadratureNonConvergence(String),
}

pub type Result<T> = std::result::Result<T, GalError>;
