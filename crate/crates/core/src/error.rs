use thiserror::Error;

/// Failure classes, used by the CLI to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Precondition,
    Numerical,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (defect {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("iteration did not converge: {0}")]
    ConvergenceFailure(String),

    #[error("eigenvalue {eigenvalue} lies within {tol:.3e} of the branch cut (-inf, 0]")]
    SpectrumOnCut { eigenvalue: num_complex::Complex64, tol: f64 },

    #[error("Schatten exponent must satisfy p >= 1, got {0}")]
    InvalidExponent(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("weight spectrum leaves (0, 1] or is too close to singular (min eigenvalue {min_eigenvalue:.3e})")]
    IllConditionedWeight { min_eigenvalue: f64 },

    #[error("operator is not A-symmetric (residual {residual:.3e})")]
    NotASymmetric { residual: f64 },

    #[error("operator is not A-anti-symmetric (residual {residual:.3e})")]
    NotAntisymmetric { residual: f64 },

    #[error("basis columns are numerically rank deficient")]
    RankDeficientBasis,

    #[error("Gram matrix condition number {condition:.3e} exceeds the compatibility cap")]
    NumericallyIncompatible { condition: f64 },

    #[error("projection is trivial (0 or the identity)")]
    TrivialProjection,

    #[error("target lies outside the geodesic radius (distance {distance:.3e}, radius {radius:.3e})")]
    OutOfRadius { distance: f64, radius: f64 },

    #[error("eigenvalue {eigenvalue:.10e} is too close to the +/-1 detection band to count reliably")]
    AmbiguousEigenvalue { eigenvalue: f64 },

    #[error("projection pair has nonzero index {index}; no intertwiner exists")]
    IndexNonzero { index: i64 },

    #[error("restricted similarity factor S is singular on the regular part")]
    SingularS,

    #[error("quadrature needs at least {needed} nodes, got {got}")]
    TooFewNodes { needed: usize, got: usize },

    #[error("invalid fixture spec: {0}")]
    InvalidSpec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("workspace document error: {0}")]
    Format(#[from] serde_json::Error),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            NotHermitian { .. }
            | InvalidExponent(_)
            | DimensionMismatch { .. }
            | NotASymmetric { .. }
            | NotAntisymmetric { .. }
            | RankDeficientBasis
            | TrivialProjection
            | OutOfRadius { .. }
            | IndexNonzero { .. }
            | TooFewNodes { .. }
            | InvalidSpec(_) => ErrorClass::Precondition,
            ConvergenceFailure(_)
            | SpectrumOnCut { .. }
            | IllConditionedWeight { .. }
            | NumericallyIncompatible { .. }
            | AmbiguousEigenvalue { .. }
            | SingularS => ErrorClass::Numerical,
            Io(_) | Format(_) => ErrorClass::Io,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
