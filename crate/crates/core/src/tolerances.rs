//! Numerical thresholds shared across the crate.
//!
//! Every routine that takes a tolerance defaults to one of these; callers can
//! override them per call where the signature allows.

/// Relative hermiticity check: `max|M - M^dagger| <= HERMITICITY * max|M|`.
pub const HERMITICITY: f64 = 1e-9;

/// Relative support cutoff: eigenvalues at or below
/// `SUPPORT_CUTOFF * max(1, lambda_max)` are treated as zero.
pub const SUPPORT_CUTOFF: f64 = 1e-10;

/// Allowed deviation of a density matrix trace from one.
pub const UNIT_TRACE: f64 = 1e-10;

/// Allowed deviation of a pure state norm from one.
pub const UNIT_NORM: f64 = 1e-12;

/// Relative weight of `rho` outside (inside) `supp sigma` below which the
/// supports count as nested (orthogonal).
pub const SUPPORT_LEAK: f64 = 1e-9;

/// Allowed deviation of `sum K^dagger K` from the identity.
pub const TRACE_PRESERVING: f64 = 1e-9;

/// Threshold on the relative equality-condition residual for an "equal" verdict.
pub const EQ_TOL: f64 = 1e-7;

/// Threshold on `|DPI gap|` that counts as equality when cross-checking verdicts.
pub const CROSS_TOL: f64 = 1e-6;

/// Target accuracy of optimized entropic values.
pub const OPT_TOL: f64 = 1e-6;
