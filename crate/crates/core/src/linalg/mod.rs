//! Dense complex linear algebra on Hermitian operators.

pub mod eig;
pub mod hermitian;
pub mod matrix;
pub mod ops;

pub use eig::{jacobi_eigh, Spectrum};
pub use hermitian::{matrix_power_on_support, support_of, HermitianOperator, SupportInfo};
pub use matrix::{ComplexMatrix, C64};
pub use ops::{partial_trace, tensor, trace_middle, trace_norm, Keep};
