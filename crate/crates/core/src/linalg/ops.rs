use super::eig::jacobi_eigh;
use super::matrix::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};

/// Which factor of `A (x) B` survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Keep {
    A,
    B,
}

/// Kronecker product `A (x) B`, row-major with the `A` index major.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// Partial trace of an operator on `A (x) B` with `dim = dim_a * dim_b`.
pub fn partial_trace(m: &ComplexMatrix, dim_a: usize, dim_b: usize, keep: Keep) -> Result<ComplexMatrix> {
    let n = dim_a * dim_b;
    if !m.is_square() || m.rows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m.rows(),
        });
    }
    Ok(match keep {
        Keep::A => ComplexMatrix::from_fn(dim_a, dim_a, |i, j| {
            (0..dim_b).fold(ZERO, |acc, b| acc + m[(i * dim_b + b, j * dim_b + b)])
        }),
        Keep::B => ComplexMatrix::from_fn(dim_b, dim_b, |i, j| {
            (0..dim_a).fold(ZERO, |acc, a| acc + m[(a * dim_b + i, a * dim_b + j)])
        }),
    })
}

/// `tr_B` of an operator on `A (x) B (x) C`, leaving `A (x) C`.
pub fn trace_middle(m: &ComplexMatrix, dim_a: usize, dim_b: usize, dim_c: usize) -> Result<ComplexMatrix> {
    let n = dim_a * dim_b * dim_c;
    if !m.is_square() || m.rows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m.rows(),
        });
    }
    let idx = |a: usize, b: usize, c: usize| (a * dim_b + b) * dim_c + c;
    Ok(ComplexMatrix::from_fn(dim_a * dim_c, dim_a * dim_c, |i, j| {
        let (a, c) = (i / dim_c, i % dim_c);
        let (a2, c2) = (j / dim_c, j % dim_c);
        (0..dim_b).fold(ZERO, |acc, b| acc + m[(idx(a, b, c), idx(a2, b, c2))])
    }))
}

/// Sum of singular values.
///
/// Singular values are read off the Hermitian dilation `[[0, A], [A^dagger, 0]]`,
/// whose spectrum is `+-s_i`; this keeps absolute accuracy for tiny singular
/// values, unlike square roots of the eigenvalues of `A^dagger A`.
pub fn trace_norm(a: &ComplexMatrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: a.cols(),
        });
    }
    let n = a.rows();
    if a.hermiticity_deviation() == 0.0 {
        return Ok(jacobi_eigh(a)?.eigenvalues.iter().map(|l| l.abs()).sum());
    }
    let dilation = ComplexMatrix::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
        (true, false) => a[(i, j - n)],
        (false, true) => a[(j, i - n)].conj(),
        _ => ZERO,
    });
    let spec = jacobi_eigh(&dilation)?;
    Ok(0.5 * spec.eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
}
