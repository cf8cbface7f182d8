use std::ops::Deref;
use std::sync::OnceLock;

use super::eig::{jacobi_eigh, Spectrum};
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::tolerances::{HERMITICITY, SUPPORT_CUTOFF};

/// Square complex matrix equal to its adjoint.
///
/// The eigendecomposition is computed on first use and cached, so matrix
/// functions of the same operator share one diagonalization.
#[derive(Clone)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
    spectrum: OnceLock<Spectrum>,
}

impl HermitianOperator {
    /// Checks `max|M - M^dagger| <= 1e-9 * max|M|` and symmetrizes.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, HERMITICITY)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.rows(),
                found: matrix.cols(),
            });
        }
        let deviation = matrix.hermiticity_deviation();
        if deviation > tol * matrix.max_abs() {
            return Err(Error::NonHermitianInput { deviation });
        }
        Ok(Self::from_matrix_unchecked(matrix))
    }

    /// Symmetrizes without checking; for matrices Hermitian by construction.
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self {
            matrix: matrix.hermitian_part(),
            spectrum: OnceLock::new(),
        }
    }

    pub(crate) fn from_spectrum(spectrum: Spectrum) -> Self {
        let matrix = spectrum.reconstruct();
        let cell = OnceLock::new();
        let _ = cell.set(spectrum);
        Self { matrix, spectrum: cell }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_matrix_unchecked(ComplexMatrix::identity(n))
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        Self::from_matrix_unchecked(ComplexMatrix::from_diag(diag))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn eig(&self) -> Result<&Spectrum> {
        if let Some(s) = self.spectrum.get() {
            return Ok(s);
        }
        let s = jacobi_eigh(&self.matrix)?;
        let _ = self.spectrum.set(s);
        Ok(self.spectrum.get().expect("just set"))
    }

    /// `f(H)` through the eigendecomposition.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Result<HermitianOperator> {
        Ok(Self::from_matrix_unchecked(self.eig()?.map(f)))
    }

    pub fn support(&self) -> Result<SupportInfo> {
        support_of(self, SUPPORT_CUTOFF)
    }

    pub fn power_on_support(&self, p: f64) -> Result<HermitianOperator> {
        matrix_power_on_support(self, p, SUPPORT_CUTOFF)
    }

    pub fn add(&self, other: &HermitianOperator) -> HermitianOperator {
        Self::from_matrix_unchecked(&self.matrix + &other.matrix)
    }

    pub fn sub(&self, other: &HermitianOperator) -> HermitianOperator {
        Self::from_matrix_unchecked(&self.matrix - &other.matrix)
    }

    pub fn scale(&self, s: f64) -> HermitianOperator {
        Self::from_matrix_unchecked(self.matrix.scale_real(s))
    }

    /// `A H A^dagger`, Hermitian for any `A`.
    pub fn congruence(&self, a: &ComplexMatrix) -> HermitianOperator {
        Self::from_matrix_unchecked(a.conjugate(&self.matrix))
    }

    pub fn tensor(&self, other: &HermitianOperator) -> HermitianOperator {
        Self::from_matrix_unchecked(self.matrix.kron(&other.matrix))
    }

    /// `tr(self * other)` for Hermitian operands (real up to roundoff).
    pub fn trace_product(&self, other: &HermitianOperator) -> f64 {
        self.matrix.hs_inner(&other.matrix).re
    }
}

impl Deref for HermitianOperator {
    type Target = ComplexMatrix;

    fn deref(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

impl std::fmt::Debug for HermitianOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.matrix.fmt(f)
    }
}

impl PartialEq for HermitianOperator {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

/// Rank and orthogonal projector of the support of a positive operator.
#[derive(Debug, Clone)]
pub struct SupportInfo {
    pub rank: usize,
    pub projector: HermitianOperator,
    pub cutoff_used: f64,
    /// Orthonormal basis of the support (columns), largest eigenvalue last.
    pub basis: ComplexMatrix,
}

/// Absolute eigenvalue threshold `cutoff * max(1, lambda_max)`.
pub(crate) fn support_threshold(spectrum: &Spectrum, cutoff: f64) -> f64 {
    cutoff * spectrum.max_abs_eigenvalue().max(1.0)
}

fn check_negativity(spectrum: &Spectrum, threshold: f64) -> Result<()> {
    let min = spectrum.min_eigenvalue();
    if min < -threshold {
        return Err(Error::NegativeEigenvalue { value: min });
    }
    Ok(())
}

/// Support of a positive semidefinite operator under the relative cutoff rule.
pub fn support_of(a: &HermitianOperator, cutoff: f64) -> Result<SupportInfo> {
    let spectrum = a.eig()?;
    let threshold = support_threshold(spectrum, cutoff);
    check_negativity(spectrum, threshold)?;
    let n = a.dim();
    let kept: Vec<usize> = (0..n)
        .filter(|&k| spectrum.eigenvalues[k] > threshold)
        .collect();
    let columns: Vec<_> = kept.iter().map(|&k| spectrum.eigenvectors.column(k)).collect();
    let projector = HermitianOperator::from_matrix_unchecked(
        spectrum.map(|l| if l > threshold { 1.0 } else { 0.0 }),
    );
    Ok(SupportInfo {
        rank: kept.len(),
        projector,
        cutoff_used: threshold,
        basis: ComplexMatrix::from_columns(n, &columns),
    })
}

/// `A^p` restricted to `supp A`: eigenvalues above the cutoff map to `l^p`,
/// the rest (including slightly negative roundoff) map to zero. `p = 0`
/// yields the support projector.
pub fn matrix_power_on_support(a: &HermitianOperator, p: f64, cutoff: f64) -> Result<HermitianOperator> {
    let spectrum = a.eig()?;
    let threshold = support_threshold(spectrum, cutoff);
    check_negativity(spectrum, threshold)?;
    let powered = Spectrum {
        eigenvalues: spectrum
            .eigenvalues
            .iter()
            .map(|&l| if l > threshold { l.powf(p) } else { 0.0 })
            .collect(),
        eigenvectors: spectrum.eigenvectors.clone(),
    };
    Ok(HermitianOperator::from_spectrum(powered))
}
