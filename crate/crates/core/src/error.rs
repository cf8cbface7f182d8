use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |M - M^dagger| = {deviation:.3e})")]
    NonHermitianInput { deviation: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("operator has eigenvalue {value:.3e} below the negativity cutoff")]
    NegativeEigenvalue { value: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("trace {trace} differs from 1")]
    NotUnitTrace { trace: f64 },

    #[error("vector norm {norm} differs from 1")]
    NotNormalized { norm: f64 },

    #[error("supp(rho) is not contained in supp(sigma)")]
    SupportViolation,

    #[error("rho and sigma have orthogonal supports")]
    DisjointSupports,

    #[error("Kraus operators are not trace preserving (max deviation {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },

    #[error("projectors do not resolve the identity (max deviation {deviation:.3e})")]
    IncompleteResolution { deviation: f64 },

    #[error("POVM elements do not sum to the identity (max deviation {deviation:.3e})")]
    IncompletePovm { deviation: f64 },

    #[error("invalid Renyi order {alpha}: {reason}")]
    InvalidOrder { alpha: f64, reason: &'static str },

    #[error("P is not absolutely continuous with respect to Q")]
    AbsoluteContinuityViolation,

    #[error("optimizer did not converge; best value found {best}")]
    OptimizerNonConvergence { best: f64 },

    #[error("dimension {dim} too small, need at least {required}")]
    DimensionTooSmall { dim: usize, required: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
