//! Sandwiched Rényi divergences on finite-dimensional quantum systems: dense
//! Hermitian linear algebra, states and channels, the divergence family,
//! data-processing equality certificates with the Petz recovery map, and
//! entanglement quantities built on the conditional Rényi entropy.
//!
//! All logarithms are base 2.
//!
//! ```
//! use srd_core::{srd, DensityMatrix, PositiveOperator, RenyiOrder};
//!
//! let rho = DensityMatrix::from_diag(&[1.0, 0.0])?;
//! let sigma = PositiveOperator::from_diag(&[0.5, 0.5])?;
//! let d = srd(&rho, &sigma, RenyiOrder::new(2.0)?)?;
//! assert!((d.to_f64() - 1.0).abs() < 1e-12);
//! # Ok::<(), srd_core::Error>(())
//! ```

pub mod channels;
pub mod divergences;
pub mod dpi;
pub mod entanglement;
pub mod entropy;
pub mod error;
pub mod linalg;
pub mod optimize;
pub mod rng;
pub mod states;
pub mod tolerances;

pub use channels::QuantumChannel;
pub use divergences::{d_max, qre, rre, srd, DivergenceValue, Extended, RenyiOrder, SupportCase};
pub use dpi::{dpi_check, equality_residual, petz_recovery, sufficiency_test, DpiReport, EqualityCertificate};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, HermitianOperator, C64};
pub use states::{BipartiteState, DensityMatrix, PositiveOperator, PureState};
