//! Data-processing checks for the sandwiched divergence: the gap itself, the
//! operator equality condition, the Petz recovery map and a randomized
//! search for violations below `alpha = 1/2`.

use serde::Serialize;

use crate::channels::{partial_trace_channel, QuantumChannel};
use crate::divergences::{h_hat, srd, srd_positive, DivergenceValue, RenyiOrder};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianOperator, Keep, C64};
use crate::optimize::{minimize, MinimizeOptions};
use crate::rng::{gaussian_matrix, stream};
use crate::states::{fidelity, BipartiteState, DensityMatrix, PositiveOperator};
use crate::tolerances::EQ_TOL;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DpiReport {
    /// `D(rho || sigma)`
    pub lhs: DivergenceValue,
    /// `D(Lambda rho || Lambda sigma)`
    pub rhs: DivergenceValue,
    /// `lhs - rhs`, not clamped
    pub gap: f64,
    pub alpha: RenyiOrder,
}

fn require_finite(v: DivergenceValue, alpha: f64) -> Result<f64> {
    v.as_finite().ok_or(if alpha < 1.0 {
        Error::DisjointSupports
    } else {
        Error::SupportViolation
    })
}

pub fn dpi_check(
    rho: &DensityMatrix,
    sigma: &PositiveOperator,
    channel: &QuantumChannel,
    order: RenyiOrder,
) -> Result<DpiReport> {
    let lhs = srd(rho, sigma, order)?;
    let l = require_finite(lhs, order.alpha())?;
    let rhs = srd(&channel.apply_state(rho)?, &channel.apply(sigma)?, order)?;
    let r = require_finite(rhs, order.alpha())?;
    Ok(DpiReport {
        lhs,
        rhs,
        gap: l - r,
        alpha: order,
    })
}

/// How `Lambda^dagger` is evaluated in the equality test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AdjointRoute {
    /// `sum_k K_k^dagger Y K_k`
    #[default]
    Kraus,
    /// `V^dagger (I (x) Y) V` with `V` taken from the unitary dilation.
    Stinespring,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Equal,
    NotEqual,
}

#[derive(Debug, Clone)]
pub struct EqualityCertificate {
    /// `max |lhs - rhs|`
    pub residual: f64,
    /// `sigma^gamma (sigma^gamma rho sigma^gamma)^{alpha-1} sigma^gamma`
    pub lhs_operator: HermitianOperator,
    /// The same expression for the images, pulled back by `Lambda^dagger`.
    pub rhs_operator: HermitianOperator,
    pub verdict: Verdict,
    /// `eq_tol * max(1, max|lhs|)`
    pub threshold: f64,
}

impl EqualityCertificate {
    fn new(lhs: HermitianOperator, rhs: HermitianOperator, eq_tol: f64) -> Self {
        let residual = lhs.max_diff(&rhs);
        let threshold = eq_tol * lhs.max_abs().max(1.0);
        Self {
            residual,
            verdict: if residual <= threshold {
                Verdict::Equal
            } else {
                Verdict::NotEqual
            },
            lhs_operator: lhs,
            rhs_operator: rhs,
            threshold,
        }
    }

    pub fn is_equal(&self) -> bool {
        self.verdict == Verdict::Equal
    }
}

/// Tests the operator identity characterizing equality in the data-processing
/// inequality, with `Lambda^dagger` from the Kraus operators.
pub fn equality_residual(
    rho: &DensityMatrix,
    sigma: &PositiveOperator,
    channel: &QuantumChannel,
    order: RenyiOrder,
) -> Result<EqualityCertificate> {
    equality_residual_with(rho, sigma, channel, order, AdjointRoute::Kraus, EQ_TOL)
}

pub fn equality_residual_with(
    rho: &DensityMatrix,
    sigma: &PositiveOperator,
    channel: &QuantumChannel,
    order: RenyiOrder,
    route: AdjointRoute,
    eq_tol: f64,
) -> Result<EqualityCertificate> {
    let lhs = h_hat(rho, sigma, order)?;
    let image = h_hat(&channel.apply(rho)?, &channel.apply(sigma)?, order)?;
    let rhs = match route {
        AdjointRoute::Kraus => channel.apply_adjoint(&image)?,
        AdjointRoute::Stinespring => channel.stinespring().apply_adjoint(&image)?,
    };
    Ok(EqualityCertificate::new(lhs.hermitian().clone(), rhs, eq_tol))
}

/// The equality condition for `Lambda = tr_B`: compares
/// `h(rho_A, sigma_A) (x) I_B` with `h(rho_AB, sigma_AB)`.
pub fn equality_residual_partial_trace(
    rho_ab: &BipartiteState,
    sigma_ab: &BipartiteState,
    order: RenyiOrder,
) -> Result<EqualityCertificate> {
    if rho_ab.dim_a != sigma_ab.dim_a || rho_ab.dim_b != sigma_ab.dim_b {
        return Err(Error::DimensionMismatch {
            expected: rho_ab.state.dim(),
            found: sigma_ab.state.dim(),
        });
    }
    let lhs = h_hat(&rho_ab.state, &sigma_ab.state, order)?;
    let marginal = h_hat(&rho_ab.marginal_a(), &sigma_ab.marginal_a(), order)?;
    let rhs = marginal.hermitian().tensor(&HermitianOperator::identity(rho_ab.dim_b));
    Ok(EqualityCertificate::new(lhs.hermitian().clone(), rhs, EQ_TOL))
}

/// `R(X) = sigma^{1/2} Lambda^dagger(Lambda(sigma)^{-1/2} X Lambda(sigma)^{-1/2}) sigma^{1/2}`
#[derive(Debug, Clone)]
pub struct RecoveryMap {
    /// Kraus form of `R`, completed on `ker Lambda(sigma)` so that it is
    /// trace preserving everywhere.
    pub channel: QuantumChannel,
    pub anchor_sigma: PositiveOperator,
    pub forward: QuantumChannel,
}

impl RecoveryMap {
    pub fn recover(&self, omega: &PositiveOperator) -> Result<PositiveOperator> {
        self.channel.apply(omega)
    }
}

/// Petz recovery map of `sigma` through `channel`. The Kraus operators are
/// `sigma^{1/2} K_k^dagger Lambda(sigma)^{-1/2}`; inputs supported on
/// `ker Lambda(sigma)` are sent to `sigma / tr sigma` by the extra operators
/// `sqrt(mu_m) |m><e_j|`.
pub fn petz_recovery(sigma: &PositiveOperator, channel: &QuantumChannel) -> Result<RecoveryMap> {
    let t = sigma.trace();
    if t <= 0.0 {
        return Err(Error::InvalidArgument("anchor state must be nonzero".into()));
    }
    let image = channel.apply(sigma)?;
    let image_inv_sqrt = image.power(-0.5)?;
    let sigma_sqrt = sigma.power(0.5)?;
    let mut kraus: Vec<ComplexMatrix> = channel
        .kraus()
        .iter()
        .map(|k| sigma_sqrt.matmul(&k.adjoint()).matmul(image_inv_sqrt.matrix()))
        .collect();

    let support = image.support()?;
    let spec = image.eig()?;
    let dout = channel.dim_out();
    let kernel: Vec<Vec<C64>> = (0..dout - support.rank).map(|k| spec.eigenvectors.column(k)).collect();
    if !kernel.is_empty() {
        let s = sigma.eig()?;
        for (m, &mu) in s.eigenvalues.iter().enumerate() {
            let w = mu / t;
            if w <= 0.0 {
                continue;
            }
            let col = s.eigenvectors.column(m);
            for e in &kernel {
                let conj: Vec<C64> = e.to_vec();
                kraus.push(ComplexMatrix::outer(&col, &conj).scale_real(w.sqrt()));
            }
        }
    }
    Ok(RecoveryMap {
        channel: QuantumChannel::from_kraus_unchecked(kraus),
        anchor_sigma: sigma.clone(),
        forward: channel.clone(),
    })
}

/// `max |R(Lambda(rho)) - rho|`
pub fn recovery_error(rho: &DensityMatrix, sigma: &PositiveOperator, channel: &QuantumChannel) -> Result<f64> {
    let r = petz_recovery(sigma, channel)?;
    Ok(r.recover(&channel.apply(rho)?)?.max_diff(rho.matrix()))
}

/// Whether the Petz map of `sigma` also recovers `rho`, within `eq_tol`.
pub fn sufficiency_test(rho: &DensityMatrix, sigma: &PositiveOperator, channel: &QuantumChannel) -> Result<bool> {
    Ok(recovery_error(rho, sigma, channel)? <= EQ_TOL)
}

/// Two-outcome projective qubit measurement minimizing the classical
/// fidelity of the outcome distributions.
#[derive(Debug, Clone)]
pub struct FidelityMeasurement {
    pub povm: Vec<PositiveOperator>,
    /// Polar and azimuthal angle of the measured Bloch axis.
    pub theta: f64,
    pub phi: f64,
    pub classical_fidelity: f64,
    pub quantum_fidelity: f64,
}

fn bloch_projectors(theta: f64, phi: f64) -> [ComplexMatrix; 2] {
    let (s, c) = theta.sin_cos();
    let n = [s * phi.cos(), s * phi.sin(), c];
    let half = |sign: f64| {
        ComplexMatrix::new(
            2,
            2,
            vec![
                C64::new(0.5 * (1.0 + sign * n[2]), 0.0),
                C64::new(0.5 * sign * n[0], -0.5 * sign * n[1]),
                C64::new(0.5 * sign * n[0], 0.5 * sign * n[1]),
                C64::new(0.5 * (1.0 - sign * n[2]), 0.0),
            ],
        )
        .expect("2x2")
    };
    [half(1.0), half(-1.0)]
}

fn classical_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix, proj: &[ComplexMatrix]) -> f64 {
    proj.iter()
        .map(|p| {
            let a = rho.matrix().hs_inner(p).re.max(0.0);
            let b = sigma.matrix().hs_inner(p).re.max(0.0);
            (a * b).sqrt()
        })
        .sum()
}

/// Searches the Bloch sphere for the projective measurement whose outcome
/// distributions have the smallest classical fidelity; for qubits this
/// minimum equals the quantum fidelity.
pub fn fidelity_attaining_measurement(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<FidelityMeasurement> {
    if rho.dim() != 2 || sigma.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho.dim().max(sigma.dim()),
        });
    }
    let f = |x: &[f64]| classical_fidelity(rho, sigma, &bloch_projectors(x[0], x[1]));
    let mut best: Option<(Vec<f64>, f64)> = None;
    for i in 0..3 {
        for j in 0..4 {
            let x0 = vec![(i as f64 + 0.5) * std::f64::consts::PI / 3.0, j as f64 * std::f64::consts::FRAC_PI_2];
            let m = minimize(f, x0, MinimizeOptions::default());
            if best.as_ref().is_none_or(|b| m.value < b.1) {
                best = Some((m.x, m.value));
            }
        }
    }
    let (x, value) = best.expect("non-empty grid");
    let povm = bloch_projectors(x[0], x[1])
        .into_iter()
        .map(|p| PositiveOperator::from_hermitian_unchecked(HermitianOperator::from_matrix_unchecked(p)))
        .collect();
    Ok(FidelityMeasurement {
        povm,
        theta: x[0],
        phi: x[1],
        classical_fidelity: value,
        quantum_fidelity: fidelity(rho, sigma)?,
    })
}

/// Random instance family for [`dpi_violation_search`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchFamily {
    /// `G G^dagger / tr` with Gaussian `4 x r` factors of random rank `r`.
    #[default]
    General,
    /// Diagonal states with Gaussian-modulus weights (classical pairs).
    Commuting,
}

#[derive(Debug, Clone, Copy)]
pub struct ViolationSearchOptions {
    pub trials: usize,
    pub seed: u64,
    pub refine_steps: usize,
    pub family: SearchFamily,
}

impl Default for ViolationSearchOptions {
    fn default() -> Self {
        Self {
            trials: 20_000,
            seed: 0,
            refine_steps: 200,
            family: SearchFamily::General,
        }
    }
}

/// Most DPI-violating two-qubit pair found under `tr_B`.
#[derive(Debug, Clone)]
pub struct ViolationInstance {
    pub rho_ab: BipartiteState,
    pub sigma_ab: BipartiteState,
    /// `D(rho_AB || sigma_AB) - D(rho_A || sigma_A)`; negative is a violation.
    pub gap: f64,
    /// Trial index of the random starting point.
    pub trial: usize,
    /// Gap of the starting point before refinement.
    pub sampled_gap: f64,
}

struct Generators {
    rank_rho: usize,
    rank_sigma: usize,
    family: SearchFamily,
}

impl Generators {
    fn len(&self) -> usize {
        2 * 4 * (self.rank_rho + self.rank_sigma)
    }

    fn state(&self, x: &[f64], rank: usize) -> DensityMatrix {
        let g = ComplexMatrix::from_fn(4, rank, |i, j| C64::new(x[2 * (i * rank + j)], x[2 * (i * rank + j) + 1]));
        let m = match self.family {
            SearchFamily::General => g.matmul(&g.adjoint()),
            SearchFamily::Commuting => {
                let w: Vec<f64> = (0..4).map(|i| (0..rank).map(|j| g[(i, j)].norm_sqr()).sum()).collect();
                ComplexMatrix::from_diag(&w)
            }
        };
        let t = m.trace().re;
        DensityMatrix::from_positive_unchecked(PositiveOperator::from_hermitian_unchecked(
            HermitianOperator::from_matrix_unchecked(m.scale_real(1.0 / t)),
        ))
    }

    fn pair(&self, x: &[f64]) -> (DensityMatrix, DensityMatrix) {
        let split = 8 * self.rank_rho;
        (self.state(&x[..split], self.rank_rho), self.state(&x[split..], self.rank_sigma))
    }

    fn gap(&self, x: &[f64], order: RenyiOrder, trace_b: &QuantumChannel) -> f64 {
        let (rho, sigma) = self.pair(x);
        let eval = || -> Result<f64> {
            let full = srd_positive(&rho, &sigma, order)?;
            let reduced = srd(&trace_b.apply_state(&rho)?, &trace_b.apply(&sigma)?, order)?;
            match (full.as_finite(), reduced.as_finite()) {
                (Some(a), Some(b)) => Ok(a - b),
                _ => Ok(f64::INFINITY),
            }
        };
        eval().unwrap_or(f64::INFINITY)
    }
}

/// Random search over two-qubit pairs for the smallest value of
/// `D(rho_AB || sigma_AB) - D(tr_B rho || tr_B sigma)`, followed by
/// coordinate-wise refinement of the best pair's Gaussian factors.
pub fn dpi_violation_search(alpha: f64, opts: &ViolationSearchOptions) -> Result<ViolationInstance> {
    let order = RenyiOrder::new(alpha)?;
    order.require_not_one()?;
    let trace_b = partial_trace_channel(2, 2, Keep::A);
    let mut best: Option<(Generators, Vec<f64>, f64, usize)> = None;
    for trial in 0..opts.trials.max(1) {
        let mut rng = stream(opts.seed, trial as u64);
        use rand::Rng;
        let gens = Generators {
            rank_rho: rng.random_range(1..=4),
            rank_sigma: rng.random_range(1..=4),
            family: opts.family,
        };
        let x: Vec<f64> = gaussian_matrix(1, gens.len() / 2, &mut rng)
            .data()
            .iter()
            .flat_map(|z| [z.re, z.im])
            .collect();
        let g = gens.gap(&x, order, &trace_b);
        if best.as_ref().is_none_or(|b| g < b.2) {
            best = Some((gens, x, g, trial));
        }
    }
    let (gens, mut x, sampled_gap, trial) = best.expect("at least one trial");
    let mut gap = sampled_gap;
    let mut step = 0.1;
    let n = x.len();
    let mut improved_in_cycle = false;
    for s in 0..opts.refine_steps {
        let i = s % n;
        let original = x[i];
        let mut best_here = (gap, original);
        for delta in [step, -step] {
            x[i] = original + delta;
            let g = gens.gap(&x, order, &trace_b);
            if g < best_here.0 {
                best_here = (g, x[i]);
            }
        }
        x[i] = best_here.1;
        if best_here.0 < gap {
            gap = best_here.0;
            improved_in_cycle = true;
        }
        if i == n - 1 {
            if !improved_in_cycle {
                step *= 0.5;
            }
            improved_in_cycle = false;
        }
    }
    let (rho, sigma) = gens.pair(&x);
    Ok(ViolationInstance {
        rho_ab: BipartiteState::new(rho, 2, 2)?,
        sigma_ab: BipartiteState::new(sigma, 2, 2)?,
        gap,
        trial,
        sampled_gap,
    })
}
