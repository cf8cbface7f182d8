//! Quantum channels in Kraus form, their adjoints and Stinespring dilations,
//! and the Heisenberg-Weyl twirl.

use std::f64::consts::PI;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::matrix::{ONE, ZERO};
use crate::linalg::{partial_trace, ComplexMatrix, HermitianOperator, Keep, C64};
use crate::rng::gaussian_matrix;
use crate::states::{maximally_mixed, BipartiteState, DensityMatrix, PositiveOperator, PureState};
use crate::tolerances::TRACE_PRESERVING;

/// Completely positive trace-preserving map `X -> sum_k K_k X K_k^dagger`.
#[derive(Debug, Clone)]
pub struct QuantumChannel {
    kraus: Vec<ComplexMatrix>,
    dim_in: usize,
    dim_out: usize,
}

impl QuantumChannel {
    /// Validates shapes and `sum K^dagger K = I` within `1e-9`.
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidArgument("channel needs at least one Kraus operator".into()))?;
        let (dim_out, dim_in) = (first.rows(), first.cols());
        for k in &kraus {
            if k.rows() != dim_out || k.cols() != dim_in {
                return Err(Error::DimensionMismatch {
                    expected: dim_out * dim_in,
                    found: k.rows() * k.cols(),
                });
            }
        }
        let channel = Self { kraus, dim_in, dim_out };
        let deviation = channel.completeness().max_diff(&ComplexMatrix::identity(dim_in));
        if deviation > TRACE_PRESERVING {
            return Err(Error::NotTracePreserving { deviation });
        }
        Ok(channel)
    }

    /// Skips the trace-preservation check, for maps that are trace
    /// preserving only up to a controlled error.
    pub(crate) fn from_kraus_unchecked(kraus: Vec<ComplexMatrix>) -> Self {
        let (dim_out, dim_in) = (kraus[0].rows(), kraus[0].cols());
        Self { kraus, dim_in, dim_out }
    }

    /// `max |sum K^dagger K - I|`
    pub fn trace_preservation_deviation(&self) -> f64 {
        self.completeness().max_diff(&ComplexMatrix::identity(self.dim_in))
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `sum_k K_k^dagger K_k`
    pub fn completeness(&self) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            acc += &k.adjoint().matmul(k);
        }
        acc
    }

    pub fn identity(d: usize) -> Self {
        Self::unitary(ComplexMatrix::identity(d))
    }

    /// `X -> U X U^dagger` for a unitary or isometry `U`.
    pub fn unitary(u: ComplexMatrix) -> Self {
        Self {
            dim_in: u.cols(),
            dim_out: u.rows(),
            kraus: vec![u],
        }
    }

    /// Linear action on an arbitrary (not necessarily Hermitian) operator.
    pub fn apply_linear(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_input(x.rows())?;
        let mut acc = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            acc += &k.conjugate(x);
        }
        Ok(acc)
    }

    pub fn apply(&self, rho: &PositiveOperator) -> Result<PositiveOperator> {
        let out = self.apply_linear(rho.matrix())?;
        Ok(PositiveOperator::from_hermitian_unchecked(
            HermitianOperator::from_matrix_unchecked(out),
        ))
    }

    /// Image of a density matrix; trace is preserved up to roundoff.
    pub fn apply_state(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let out = self.apply(rho)?;
        let t = out.trace();
        Ok(DensityMatrix::from_positive_unchecked(out.scale(1.0 / t)))
    }

    /// Hilbert-Schmidt adjoint `Y -> sum_k K_k^dagger Y K_k`.
    pub fn adjoint_linear(&self, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        if y.rows() != self.dim_out || !y.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.dim_out,
                found: y.rows(),
            });
        }
        let mut acc = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            acc += &k.adjoint().matmul(y).matmul(k);
        }
        Ok(acc)
    }

    pub fn apply_adjoint(&self, y: &HermitianOperator) -> Result<HermitianOperator> {
        Ok(HermitianOperator::from_matrix_unchecked(self.adjoint_linear(y.matrix())?))
    }

    /// `N (x) id_d` with the channel on the leading factor.
    pub fn tensor_identity(&self, d: usize) -> QuantumChannel {
        let id = ComplexMatrix::identity(d);
        Self {
            kraus: self.kraus.iter().map(|k| k.kron(&id)).collect(),
            dim_in: self.dim_in * d,
            dim_out: self.dim_out * d,
        }
    }

    /// `second o self`
    pub fn then(&self, second: &QuantumChannel) -> Result<QuantumChannel> {
        if second.dim_in != self.dim_out {
            return Err(Error::DimensionMismatch {
                expected: self.dim_out,
                found: second.dim_in,
            });
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * second.kraus.len());
        for k2 in &second.kraus {
            for k1 in &self.kraus {
                kraus.push(k2.matmul(k1));
            }
        }
        Ok(Self {
            kraus,
            dim_in: self.dim_in,
            dim_out: second.dim_out,
        })
    }

    fn check_input(&self, dim: usize) -> Result<()> {
        if dim != self.dim_in {
            return Err(Error::DimensionMismatch {
                expected: self.dim_in,
                found: dim,
            });
        }
        Ok(())
    }

    /// Stinespring dilation with the environment as the leading factor:
    /// `V|psi> = sum_k |k>_E (x) K_k|psi>` on `E (x) K` where `E = H (x) H'`,
    /// completed to a unitary on `H (x) H' (x) K`.
    pub fn stinespring(&self) -> StinespringDilation {
        let dim_h = self.dim_in;
        let dim_k = self.dim_out;
        let dim_h_prime = self.kraus.len().div_ceil(dim_h).max(1);
        let dim_env = dim_h * dim_h_prime;
        let n = dim_env * dim_k;

        let isometry = ComplexMatrix::from_fn(n, dim_h, |row, i| {
            let (e, out) = (row / dim_k, row % dim_k);
            self.kraus.get(e).map_or(ZERO, |k| k[(out, i)])
        });

        // |psi>_H (x) |0>_{H'} (x) |0>_K sits at index i * dim_h_prime * dim_k
        let stride = dim_h_prime * dim_k;
        let fixed: Vec<Vec<C64>> = (0..dim_h).map(|i| isometry.column(i)).collect();
        let extension = orthonormal_extension(&fixed, n);
        let mut ext = extension.into_iter();
        let mut columns = Vec::with_capacity(n);
        for j in 0..n {
            if j % stride == 0 {
                columns.push(fixed[j / stride].clone());
            } else {
                columns.push(ext.next().expect("extension has n - dim_h vectors"));
            }
        }
        let unitary = ComplexMatrix::from_columns(n, &columns);
        StinespringDilation {
            ancilla: PureState::basis(dim_h_prime * dim_k, 0),
            unitary,
            isometry,
            dim_h,
            dim_h_prime,
            dim_k,
        }
    }
}

/// Completes orthonormal `fixed` vectors in `C^n` to a basis using the
/// standard basis vectors, in order, as candidates.
fn orthonormal_extension(fixed: &[Vec<C64>], n: usize) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = fixed.to_vec();
    let mut added = Vec::with_capacity(n - fixed.len());
    for j in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v = vec![ZERO; n];
        v[j] = ONE;
        // two passes of Gram-Schmidt
        for _ in 0..2 {
            for q in &basis {
                let proj: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= proj * y;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            for x in &mut v {
                *x /= norm;
            }
            basis.push(v.clone());
            added.push(v);
        }
    }
    added
}

/// Unitary `U` on `H (x) H' (x) K` and pure ancilla `tau` on `H' (x) K` with
/// `Lambda(rho) = tr_12(U (rho (x) tau) U^dagger)`.
#[derive(Debug, Clone)]
pub struct StinespringDilation {
    pub ancilla: PureState,
    pub unitary: ComplexMatrix,
    /// `V = U (I_H (x) |tau>)`
    pub isometry: ComplexMatrix,
    pub dim_h: usize,
    pub dim_h_prime: usize,
    pub dim_k: usize,
}

impl StinespringDilation {
    fn dim_env(&self) -> usize {
        self.dim_h * self.dim_h_prime
    }

    /// `tr_12(U (X (x) tau) U^dagger)`
    pub fn apply_linear(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let joint = x.kron(&self.ancilla.projector());
        let rotated = self.unitary.conjugate(&joint);
        partial_trace(&rotated, self.dim_env(), self.dim_k, Keep::B)
    }

    /// `V^dagger (I_{12} (x) Y) V`
    pub fn adjoint_linear(&self, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        if y.rows() != self.dim_k {
            return Err(Error::DimensionMismatch {
                expected: self.dim_k,
                found: y.rows(),
            });
        }
        let lifted = ComplexMatrix::identity(self.dim_env()).kron(y);
        Ok(self.isometry.adjoint().matmul(&lifted).matmul(&self.isometry))
    }

    pub fn apply_adjoint(&self, y: &HermitianOperator) -> Result<HermitianOperator> {
        Ok(HermitianOperator::from_matrix_unchecked(self.adjoint_linear(y.matrix())?))
    }
}

/// Kraus operators `I_A (x) <b|` (keep A) or `<a| (x) I_B` (keep B).
pub fn partial_trace_channel(dim_a: usize, dim_b: usize, keep: Keep) -> QuantumChannel {
    let kraus: Vec<ComplexMatrix> = match keep {
        Keep::A => (0..dim_b)
            .map(|b| ComplexMatrix::identity(dim_a).kron(&bra(dim_b, b)))
            .collect(),
        Keep::B => (0..dim_a)
            .map(|a| bra(dim_a, a).kron(&ComplexMatrix::identity(dim_b)))
            .collect(),
    };
    let (dim_in, dim_out) = (dim_a * dim_b, if keep == Keep::A { dim_a } else { dim_b });
    QuantumChannel { kraus, dim_in, dim_out }
}

fn bra(d: usize, i: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(1, d);
    m[(0, i)] = ONE;
    m
}

fn ket(d: usize, i: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, 1);
    m[(i, 0)] = ONE;
    m
}

/// `rho -> sum_i P_i rho P_i` for orthogonal projectors resolving the identity.
pub fn pinching_channel(projectors: &[HermitianOperator]) -> Result<QuantumChannel> {
    let d = projectors
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty projector list".into()))?
        .dim();
    let mut sum = ComplexMatrix::zeros(d, d);
    let mut deviation: f64 = 0.0;
    for p in projectors {
        if p.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: p.dim(),
            });
        }
        deviation = deviation.max(p.matmul(p).max_diff(p));
        sum += p.matrix();
    }
    deviation = deviation.max(sum.max_diff(&ComplexMatrix::identity(d)));
    if deviation > TRACE_PRESERVING {
        return Err(Error::IncompleteResolution { deviation });
    }
    Ok(QuantumChannel {
        kraus: projectors.iter().map(|p| p.matrix().clone()).collect(),
        dim_in: d,
        dim_out: d,
    })
}

/// Pinching onto the computational basis of `C^d`.
pub fn diagonal_pinching(d: usize) -> QuantumChannel {
    let projectors: Vec<_> = (0..d)
        .map(|i| {
            let mut diag = vec![0.0; d];
            diag[i] = 1.0;
            HermitianOperator::from_diag(&diag)
        })
        .collect();
    pinching_channel(&projectors).expect("standard basis resolves identity")
}

/// `w -> sum_x tr(w M_x) |x><x|`, with Kraus operators `|x><j| sqrt(M_x)`.
pub fn measurement_channel(povm: &[PositiveOperator]) -> Result<QuantumChannel> {
    let d = povm
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty POVM".into()))?
        .dim();
    let outcomes = povm.len();
    let mut sum = ComplexMatrix::zeros(d, d);
    let mut kraus = Vec::with_capacity(outcomes * d);
    for (x, m) in povm.iter().enumerate() {
        if m.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: m.dim(),
            });
        }
        sum += m.matrix();
        let root = m.sqrt()?;
        for j in 0..d {
            kraus.push(ket(outcomes, x).matmul(&bra(d, j)).matmul(root.matrix()));
        }
    }
    let deviation = sum.max_diff(&ComplexMatrix::identity(d));
    if deviation > TRACE_PRESERVING {
        return Err(Error::IncompletePovm { deviation });
    }
    Ok(QuantumChannel {
        kraus,
        dim_in: d,
        dim_out: outcomes,
    })
}

/// Qubit amplitude damping with decay probability `p`.
pub fn amplitude_damping(p: f64) -> QuantumChannel {
    assert!((0.0..=1.0).contains(&p));
    let k0 = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, (1.0 - p).sqrt()]).unwrap();
    let k1 = ComplexMatrix::from_real(2, 2, &[0.0, p.sqrt(), 0.0, 0.0]).unwrap();
    QuantumChannel {
        kraus: vec![k0, k1],
        dim_in: 2,
        dim_out: 2,
    }
}

/// Qubit dephasing `rho -> (1 - p) rho + p Z rho Z`.
pub fn dephasing(p: f64) -> QuantumChannel {
    assert!((0.0..=1.0).contains(&p));
    let k0 = ComplexMatrix::identity(2).scale_real((1.0 - p).sqrt());
    let k1 = ComplexMatrix::from_diag(&[1.0, -1.0]).scale_real(p.sqrt());
    QuantumChannel {
        kraus: vec![k0, k1],
        dim_in: 2,
        dim_out: 2,
    }
}

/// `rho -> (1 - p) rho + p tr(rho) I/d`, realized with the Heisenberg-Weyl
/// operators; `p = 1` is the completely depolarizing channel.
pub fn depolarizing(d: usize, p: f64) -> QuantumChannel {
    assert!((0.0..=1.0).contains(&p));
    let hw = heisenberg_weyl(d);
    let n = (d * d) as f64;
    let kraus = hw
        .operators
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let w = if i == 0 { 1.0 - p + p / n } else { p / n };
            v.scale_real(w.sqrt())
        })
        .collect();
    QuantumChannel { kraus, dim_in: d, dim_out: d }
}

/// Random channel from a Gaussian Kraus stack `G = [G_1; ...; G_n]`
/// orthonormalized as `G (G^dagger G)^{-1/2}`.
pub fn random_channel<R: Rng + ?Sized>(
    dim_in: usize,
    dim_out: usize,
    kraus_count: usize,
    rng: &mut R,
) -> Result<QuantumChannel> {
    if kraus_count == 0 || kraus_count * dim_out < dim_in {
        return Err(Error::InvalidArgument(format!(
            "{kraus_count} Kraus operators of shape {dim_out}x{dim_in} cannot be trace preserving"
        )));
    }
    let g = gaussian_matrix(kraus_count * dim_out, dim_in, rng);
    let gram = HermitianOperator::from_matrix_unchecked(g.adjoint().matmul(&g));
    let inv_sqrt = gram.power_on_support(-0.5)?;
    let stacked = g.matmul(inv_sqrt.matrix());
    let kraus = (0..kraus_count)
        .map(|k| ComplexMatrix::from_fn(dim_out, dim_in, |i, j| stacked[(k * dim_out + i, j)]))
        .collect();
    QuantumChannel::new(kraus)
}

/// Clock-and-shift operators `X^a Z^b` on `C^d`, indexed `a * d + b`.
#[derive(Debug, Clone)]
pub struct HeisenbergWeylSet {
    pub dim: usize,
    pub operators: Vec<ComplexMatrix>,
}

impl HeisenbergWeylSet {
    /// `(1/d^2) sum_i V_i M V_i^dagger`
    pub fn twirl(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.dim, self.dim);
        for v in &self.operators {
            acc += &v.conjugate(m);
        }
        acc.scale_real(1.0 / (self.dim * self.dim) as f64)
    }
}

pub fn heisenberg_weyl(d: usize) -> HeisenbergWeylSet {
    assert!(d >= 1);
    let omega = 2.0 * PI / d as f64;
    let mut operators = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let mut m = ComplexMatrix::zeros(d, d);
            for j in 0..d {
                m[((j + a) % d, j)] = C64::from_polar(1.0, omega * (b * j) as f64);
            }
            operators.push(m);
        }
    }
    HeisenbergWeylSet { dim: d, operators }
}

/// `rho_A (x) pi_B`, the closed form of the Heisenberg-Weyl twirl on `B`.
pub fn hw_twirl(rho_ab: &BipartiteState) -> BipartiteState {
    BipartiteState::product(&rho_ab.marginal_a(), &maximally_mixed(rho_ab.dim_b))
}

/// `(1/d^2) sum_i (I_A (x) V_i) rho_AB (I_A (x) V_i^dagger)` term by term.
pub fn hw_twirl_explicit(rho_ab: &BipartiteState) -> ComplexMatrix {
    let hw = heisenberg_weyl(rho_ab.dim_b);
    let id_a = ComplexMatrix::identity(rho_ab.dim_a);
    let mut acc = ComplexMatrix::zeros(rho_ab.state.dim(), rho_ab.state.dim());
    for v in &hw.operators {
        acc += &id_a.kron(v).conjugate(rho_ab.state.matrix());
    }
    acc.scale_real(1.0 / hw.operators.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{random_unitary, stream};
    use crate::states::{purify, random_density, random_density_seeded};

    #[test]
    fn identity_channel_leaves_state() {
        let rho = random_density_seeded(3, 3, 1);
        let out = QuantumChannel::identity(3).apply(&rho).unwrap();
        assert!(out.max_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn completely_depolarizing_outputs_maximally_mixed() {
        let rho = random_density_seeded(2, 2, 4);
        let out = depolarizing(2, 1.0).apply(&rho).unwrap();
        assert!(out.max_diff(maximally_mixed(2).matrix()) < 1e-15);
    }

    #[test]
    fn full_amplitude_damping_on_maximally_mixed() {
        // K0 = diag(1,0), K1 = |0><1|: I/2 -> |0><0|
        let out = amplitude_damping(1.0).apply(&maximally_mixed(2)).unwrap();
        assert!(out.max_diff(&ComplexMatrix::from_diag(&[1.0, 0.0])) < 1e-15);
    }

    #[test]
    fn rejects_non_trace_preserving() {
        let k = ComplexMatrix::from_diag(&[1.0, 0.5]);
        assert!(matches!(
            QuantumChannel::new(vec![k]),
            Err(Error::NotTracePreserving { .. })
        ));
    }

    #[test]
    fn unitary_adjoint_is_inverse_conjugation() {
        let u = random_unitary(3, &mut stream(3, 0));
        let ch = QuantumChannel::unitary(u.clone());
        let y = random_density_seeded(3, 3, 5);
        let adj = ch.apply_adjoint(&y).unwrap();
        let expected = u.adjoint().matmul(y.matrix()).matmul(&u);
        assert!(adj.max_diff(&expected) < 1e-14);
    }

    #[test]
    fn partial_trace_adjoint_tensors_identity() {
        // <Y, tr_B X> = <Y (x) I, X>
        let ch = partial_trace_channel(2, 3, Keep::A);
        let y = HermitianOperator::new(ComplexMatrix::from_real(2, 2, &[0.3, -1.0, -1.0, 2.0]).unwrap())
            .unwrap();
        let adj = ch.apply_adjoint(&y).unwrap();
        assert!(adj.max_diff(&y.kron(&ComplexMatrix::identity(3))) < 1e-15);
    }

    #[test]
    fn partial_trace_channel_matches_partial_trace() {
        let rho = random_density_seeded(6, 6, 12);
        for keep in [Keep::A, Keep::B] {
            let direct = partial_trace(rho.matrix(), 2, 3, keep).unwrap();
            let via = partial_trace_channel(2, 3, keep).apply(&rho).unwrap();
            assert!(via.max_diff(&direct) < 1e-15);
        }
        let bell = purify(&maximally_mixed(2)).unwrap().bipartite();
        let r = partial_trace_channel(2, 2, Keep::A).apply(&bell.state).unwrap();
        assert!(r.max_diff(&ComplexMatrix::from_diag(&[0.5, 0.5])) < 1e-15);
    }

    #[test]
    fn adjoint_is_unital() {
        let ch = random_channel(3, 2, 3, &mut stream(9, 0)).unwrap();
        let adj = ch.apply_adjoint(&HermitianOperator::identity(2)).unwrap();
        assert!(adj.max_diff(&ComplexMatrix::identity(3)) < 1e-12);
    }

    #[test]
    fn random_channel_single_kraus_is_isometry() {
        let ch = random_channel(2, 3, 1, &mut stream(1, 1)).unwrap();
        let k = &ch.kraus()[0];
        assert!(k.adjoint().matmul(k).max_diff(&ComplexMatrix::identity(2)) < 1e-12);
        assert!(random_channel(4, 1, 2, &mut stream(1, 1)).is_err());
    }

    #[test]
    fn random_channel_seed_is_pinned() {
        let ch = random_channel(2, 2, 2, &mut stream(42, 0)).unwrap();
        let k = &ch.kraus()[0];
        let got = [k[(0, 0)].re, k[(0, 0)].im, k[(1, 0)].re, k[(1, 1)].im];
        for (g, e) in got.iter().zip(GOLDEN_KRAUS_SEED_42) {
            assert!((g - e).abs() < 1e-14, "{got:?}");
        }
    }

    const GOLDEN_KRAUS_SEED_42: [f64; 4] = [
        -0.10792355819220378,
        0.03879944715237106,
        -0.5368456327343076,
        -0.15273880649955873,
    ];

    #[test]
    fn stinespring_of_identity_and_unitary() {
        let dil = QuantumChannel::identity(2).stinespring();
        assert_eq!(dil.dim_h_prime, 1);
        // environment leading: V = |0>_E (x) I
        let e0 = ComplexMatrix::from_real(2, 1, &[1.0, 0.0]).unwrap();
        assert!(dil.isometry.max_diff(&e0.kron(&ComplexMatrix::identity(2))) < 1e-15);

        let u = random_unitary(2, &mut stream(2, 0));
        let dil = QuantumChannel::unitary(u.clone()).stinespring();
        assert!(dil.isometry.max_diff(&e0.kron(&u)) < 1e-15);
    }

    #[test]
    fn stinespring_round_trip_for_dephasing() {
        let ch = dephasing(0.3);
        let dil = ch.stinespring();
        assert_eq!(dil.dim_h * dil.dim_h_prime, 2);
        let n = dil.unitary.rows();
        let uu = dil.unitary.adjoint().matmul(&dil.unitary);
        assert!(uu.max_diff(&ComplexMatrix::identity(n)) < 1e-12);
        let vv = dil.isometry.adjoint().matmul(&dil.isometry);
        assert!(vv.max_diff(&ComplexMatrix::identity(2)) < 1e-12);
        let rho = random_density_seeded(2, 2, 3);
        let a = ch.apply_linear(rho.matrix()).unwrap();
        let b = dil.apply_linear(rho.matrix()).unwrap();
        assert!(a.max_diff(&b) < 1e-10);
    }

    #[test]
    fn pinching_examples() {
        let pin = diagonal_pinching(2);
        let d = PositiveOperator::from_diag(&[0.2, 0.8]).unwrap();
        assert!(pin.apply(&d).unwrap().max_diff(d.matrix()) < 1e-16);
        let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(pin.apply_linear(&x).unwrap().max_abs() < 1e-16);
        let rho = random_density_seeded(2, 2, 6);
        let once = pin.apply(&rho).unwrap();
        let twice = pin.apply(&once).unwrap();
        assert!(once.max_diff(twice.matrix()) < 1e-16);
        let bad = [HermitianOperator::from_diag(&[1.0, 0.0])];
        assert!(matches!(pinching_channel(&bad), Err(Error::IncompleteResolution { .. })));
    }

    #[test]
    fn measurement_channel_examples() {
        let povm = [
            PositiveOperator::from_diag(&[1.0, 0.0]).unwrap(),
            PositiveOperator::from_diag(&[0.0, 1.0]).unwrap(),
        ];
        let m = measurement_channel(&povm).unwrap();
        let d = PositiveOperator::from_diag(&[0.3, 0.7]).unwrap();
        assert!(m.apply(&d).unwrap().max_diff(d.matrix()) < 1e-16);
        let rho = random_density(2, 2, &mut stream(4, 4));
        let out = m.apply(&rho).unwrap();
        assert!(out[(0, 1)].norm() < 1e-16);
        let bad = [PositiveOperator::from_diag(&[1.0, 0.5]).unwrap()];
        assert!(matches!(measurement_channel(&bad), Err(Error::IncompletePovm { .. })));
    }

    #[test]
    fn heisenberg_weyl_small_dims() {
        let hw1 = heisenberg_weyl(1);
        assert_eq!(hw1.operators, vec![ComplexMatrix::identity(1)]);
        let hw2 = heisenberg_weyl(2);
        let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let z = ComplexMatrix::from_diag(&[1.0, -1.0]);
        assert!(hw2.operators[0].max_diff(&ComplexMatrix::identity(2)) < 1e-15);
        assert!(hw2.operators[1].max_diff(&z) < 1e-15);
        assert!(hw2.operators[2].max_diff(&x) < 1e-15);
        assert!(hw2.operators[3].max_diff(&x.matmul(&z)) < 1e-15);
    }

    #[test]
    fn pauli_twirl_by_brute_force() {
        let m = crate::rng::gaussian_matrix(2, 2, &mut stream(5, 0));
        let t = heisenberg_weyl(2).twirl(&m);
        let expected = ComplexMatrix::identity(2).scale(m.trace() * 0.5);
        assert!(t.max_diff(&expected) < 1e-15);
    }

    #[test]
    fn hw_twirl_examples() {
        let bell = purify(&maximally_mixed(2)).unwrap().bipartite();
        let t = hw_twirl(&bell);
        assert!(t.state.max_diff(maximally_mixed(4).matrix()) < 1e-15);
        assert!(hw_twirl_explicit(&bell).max_diff(t.state.matrix()) < 1e-15);

        // |01><01| -> |0><0| (x) I/2
        let s = BipartiteState::new(DensityMatrix::from_diag(&[0.0, 1.0, 0.0, 0.0]).unwrap(), 2, 2).unwrap();
        let expected = ComplexMatrix::from_diag(&[0.5, 0.5, 0.0, 0.0]);
        assert!(hw_twirl(&s).state.max_diff(&expected) < 1e-15);
        assert!(hw_twirl_explicit(&s).max_diff(&expected) < 1e-15);

        let prod = BipartiteState::product(&random_density_seeded(2, 2, 1), &maximally_mixed(3));
        assert!(hw_twirl(&prod).state.max_diff(prod.state.matrix()) < 1e-15);
    }
}
