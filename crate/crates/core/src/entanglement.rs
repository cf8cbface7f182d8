//! Rényi Araki-Lieb bounds, states saturating them, Rényi entanglement of
//! formation and entanglement fidelity.

use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::channels::QuantumChannel;
use crate::divergences::RenyiOrder;
use crate::entropy::{conditional_entropy, conditional_renyi, renyi_entropy, renyi_entropy_extended, ConditionalRenyiOptions};
use crate::error::{Error, Result};
use crate::linalg::hermitian::support_threshold;
use crate::linalg::{partial_trace, ComplexMatrix, HermitianOperator, Keep, C64};
use crate::optimize::{minimize, MinimizeOptions};
use crate::rng::stream;
use crate::states::{fidelity, purify, rank_profile, BipartiteState, DensityMatrix, PureState};
use crate::tolerances::SUPPORT_CUTOFF;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ArakiLiebReport {
    pub alpha: f64,
    /// `alpha / (2 alpha - 1)`, infinite at `alpha = 1/2`
    #[serde(serialize_with = "serialize_extended")]
    pub beta: f64,
    /// `-S_beta(A)`
    pub lower: f64,
    /// `S_alpha(A|B)`
    pub value: f64,
    /// `S_alpha(A)`
    pub upper: f64,
    /// `value - lower`
    pub saturation_residual: f64,
}

fn serialize_extended<S: serde::Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str("inf")
    }
}

pub fn araki_lieb_renyi(
    rho_ab: &BipartiteState,
    order: RenyiOrder,
    opts: &ConditionalRenyiOptions,
) -> Result<ArakiLiebReport> {
    let beta = order.dual_beta().ok_or(Error::InvalidOrder {
        alpha: order.alpha(),
        reason: "needs alpha >= 1/2",
    })?;
    let rho_a = rho_ab.marginal_a();
    let value = conditional_renyi(rho_ab, order, opts)?.value;
    let lower = -renyi_entropy_extended(&rho_a, beta)?;
    Ok(ArakiLiebReport {
        alpha: order.alpha(),
        beta,
        lower,
        value,
        upper: renyi_entropy(&rho_a, order)?,
        saturation_residual: value - lower,
    })
}

/// Spectral data of a state saturating the lower Araki-Lieb bound:
/// `rho_AB = sum_i lambda_i |i><i|` with `tr_B |i><j| = delta_ij rho_A`.
#[derive(Debug, Clone, PartialEq)]
pub struct SaturatingSpec {
    /// Eigenvalues of `rho_AB`, all positive; `r_AB` is the length.
    pub lambda: Vec<f64>,
    /// Eigenvalues of `rho_A`, all positive; `r_A` is the length.
    pub rho_a_spectrum: Vec<f64>,
    pub dim_a: usize,
    pub dim_b: usize,
}

impl SaturatingSpec {
    /// Smallest dimensions that fit: `dim_a = r_A`, `dim_b = r_A r_AB`.
    pub fn minimal(lambda: Vec<f64>, rho_a_spectrum: Vec<f64>) -> Self {
        let dim_a = rho_a_spectrum.len();
        let dim_b = dim_a * lambda.len();
        Self {
            lambda,
            rho_a_spectrum,
            dim_a,
            dim_b,
        }
    }

    pub fn r_a(&self) -> usize {
        self.rho_a_spectrum.len()
    }

    pub fn r_ab(&self) -> usize {
        self.lambda.len()
    }
}

fn check_probability(p: &[f64], name: &str) -> Result<()> {
    if p.is_empty() || p.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::InvalidArgument(format!("{name} must be a non-empty positive vector")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!("{name} sums to {s}, not 1")));
    }
    Ok(())
}

/// Builds `|i>_AB = sum_k sqrt(mu_k) |k>_A |k + i r_A>_B` and mixes them
/// with weights `lambda`.
pub fn saturating_state(spec: &SaturatingSpec) -> Result<BipartiteState> {
    check_probability(&spec.lambda, "lambda")?;
    check_probability(&spec.rho_a_spectrum, "rho_A spectrum")?;
    let (r_a, r_ab) = (spec.r_a(), spec.r_ab());
    if spec.dim_a < r_a {
        return Err(Error::DimensionTooSmall {
            dim: spec.dim_a,
            required: r_a,
        });
    }
    if spec.dim_b < r_a * r_ab {
        return Err(Error::DimensionTooSmall {
            dim: spec.dim_b,
            required: r_a * r_ab,
        });
    }
    let n = spec.dim_a * spec.dim_b;
    let mut m = ComplexMatrix::zeros(n, n);
    for (i, &l) in spec.lambda.iter().enumerate() {
        let mut v = vec![C64::new(0.0, 0.0); n];
        for (k, &mu) in spec.rho_a_spectrum.iter().enumerate() {
            v[k * spec.dim_b + k + i * r_a] = C64::new(mu.sqrt(), 0.0);
        }
        m += &ComplexMatrix::outer(&v, &v).scale_real(l);
    }
    BipartiteState::new(DensityMatrix::new(m)?, spec.dim_a, spec.dim_b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaturationCheck {
    pub holds: bool,
    /// `r_B = r_A r_AB`
    pub rank_ok: bool,
    /// `tr_B |i><j| = delta_ij rho_A` over the eigenvectors of `rho_AB`
    pub cross_terms_ok: bool,
    /// Largest entry of `tr_B |i><j| - delta_ij rho_A`.
    pub cross_residual: f64,
}

const CROSS_TERM_TOL: f64 = 1e-8;

/// Tests both saturation conditions on the unit eigenvectors of `rho_AB`.
/// The cross-term condition does not depend on the basis chosen inside a
/// degenerate eigenspace, so any eigenbasis will do.
pub fn check_saturation_conditions(rho_ab: &BipartiteState) -> Result<SaturationCheck> {
    let ranks = rank_profile(rho_ab)?;
    let rank_ok = ranks.r_b == ranks.r_a * ranks.r_ab;
    let spec = rho_ab.state.eig()?;
    let threshold = support_threshold(spec, SUPPORT_CUTOFF);
    let vecs: Vec<Vec<C64>> = (0..spec.dim())
        .filter(|&k| spec.eigenvalues[k] > threshold)
        .map(|k| spec.eigenvectors.column(k))
        .collect();
    let rho_a = rho_ab.marginal_a();
    let mut residual: f64 = 0.0;
    for (i, u) in vecs.iter().enumerate() {
        for (j, v) in vecs.iter().enumerate() {
            let reduced = partial_trace(&ComplexMatrix::outer(u, v), rho_ab.dim_a, rho_ab.dim_b, Keep::A)?;
            let r = if i == j {
                reduced.max_diff(rho_a.matrix())
            } else {
                reduced.max_abs()
            };
            residual = residual.max(r);
        }
    }
    let cross_terms_ok = residual <= CROSS_TERM_TOL;
    Ok(SaturationCheck {
        holds: rank_ok && cross_terms_ok,
        rank_ok,
        cross_terms_ok,
        cross_residual: residual,
    })
}

/// `max{-S_beta(A|B), -S_beta(B|A), 0}` with `beta = alpha/(2 alpha - 1)`,
/// a lower bound on the order-`alpha` entanglement of formation for
/// `alpha > 1`.
pub fn reof_lower_bound(rho_ab: &BipartiteState, order: RenyiOrder, opts: &ConditionalRenyiOptions) -> Result<f64> {
    if order.alpha() <= 1.0 {
        return Err(Error::InvalidOrder {
            alpha: order.alpha(),
            reason: "bound holds for alpha > 1",
        });
    }
    let beta = order.dual()?;
    let ab = conditional_renyi(rho_ab, beta, opts)?.value;
    let ba = conditional_renyi(&rho_ab.swap(), beta, opts)?.value;
    Ok((-ab).max(-ba).max(0.0))
}

/// `max{-S(A|B), -S(B|A), 0}`
pub fn eof_lower_bound(rho_ab: &BipartiteState) -> Result<f64> {
    let ab = conditional_entropy(rho_ab)?;
    let ba = conditional_entropy(&rho_ab.swap())?;
    Ok((-ab).max(-ba).max(0.0))
}

#[derive(Debug, Clone)]
pub struct PureStateEnsemble {
    pub weights: Vec<f64>,
    pub states: Vec<PureState>,
}

impl PureStateEnsemble {
    pub fn average(&self) -> ComplexMatrix {
        let n = self.states.first().map_or(0, PureState::dim);
        let mut m = ComplexMatrix::zeros(n, n);
        for (w, s) in self.weights.iter().zip(&self.states) {
            m += &s.projector().scale_real(*w);
        }
        m
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ReofOptions {
    /// Defaults to `min(rk^2, 16)`, and never below `rk`.
    pub ensemble_size: Option<usize>,
    /// Gaussian starts in addition to the eigen-ensemble start.
    pub restarts: usize,
    pub seed: u64,
    pub minimize: MinimizeOptions,
}

impl Default for ReofOptions {
    fn default() -> Self {
        Self {
            ensemble_size: None,
            restarts: 2,
            seed: 0,
            minimize: MinimizeOptions {
                max_iters: 300,
                ..MinimizeOptions::default()
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct Reof {
    pub value: f64,
    pub ensemble: PureStateEnsemble,
}

struct EnsembleProblem {
    /// `sqrt(lambda_k) |e_k>` for the support eigenpairs.
    vectors: Vec<Vec<C64>>,
    dim_a: usize,
    dim_b: usize,
    size: usize,
    order: RenyiOrder,
}

impl EnsembleProblem {
    fn rank(&self) -> usize {
        self.vectors.len()
    }

    /// Isometry `U = Z (Z^dagger Z)^{-1/2}` from the `size x rank` matrix `Z`.
    fn isometry(&self, x: &[f64]) -> Option<ComplexMatrix> {
        let r = self.rank();
        let z = ComplexMatrix::from_fn(self.size, r, |i, j| C64::new(x[2 * (i * r + j)], x[2 * (i * r + j) + 1]));
        let gram = HermitianOperator::from_matrix_unchecked(z.adjoint().matmul(&z).hermitian_part());
        let spec = gram.eig().ok()?;
        if spec.min_eigenvalue() <= 1e-12 * spec.max_eigenvalue().max(1e-300) {
            return None;
        }
        Some(z.matmul(&spec.map(|l| l.powf(-0.5))))
    }

    /// Unnormalized members `w_i = sum_k U_ik v_k`.
    fn members(&self, u: &ComplexMatrix) -> Vec<Vec<C64>> {
        let n = self.dim_a * self.dim_b;
        (0..self.size)
            .map(|i| {
                let mut w = vec![C64::new(0.0, 0.0); n];
                for (k, v) in self.vectors.iter().enumerate() {
                    let c = u[(i, k)];
                    for (wi, vi) in w.iter_mut().zip(v) {
                        *wi += c * vi;
                    }
                }
                w
            })
            .collect()
    }

    fn average_entropy(&self, x: &[f64]) -> f64 {
        let Some(u) = self.isometry(x) else {
            return f64::INFINITY;
        };
        let mut total = 0.0;
        for w in self.members(&u) {
            let m = ComplexMatrix::new(self.dim_a, self.dim_b, w).expect("shape");
            let reduced = m.matmul(&m.adjoint());
            let p = reduced.trace().re;
            if p <= 1e-15 {
                continue;
            }
            let Ok(rho) = DensityMatrix::new(reduced.scale_real(1.0 / p)) else {
                return f64::INFINITY;
            };
            match renyi_entropy(&rho, self.order) {
                Ok(s) => total += p * s,
                Err(_) => return f64::INFINITY,
            }
        }
        total
    }

    fn ensemble(&self, x: &[f64]) -> Result<PureStateEnsemble> {
        let u = self.isometry(x).ok_or_else(|| Error::InvalidArgument("ensemble mixing matrix is singular".into()))?;
        let mut weights = Vec::new();
        let mut states = Vec::new();
        for w in self.members(&u) {
            let p: f64 = w.iter().map(|z| z.norm_sqr()).sum();
            if p <= 1e-15 {
                continue;
            }
            weights.push(p);
            states.push(PureState::normalized(w)?);
        }
        Ok(PureStateEnsemble { weights, states })
    }
}

/// Upper bound on the order-`alpha` entanglement of formation: a local
/// minimum of the average marginal Rényi entropy over ensembles
/// `w_i = sum_k U_ik sqrt(lambda_k) |e_k>` with `U` an isometry.
pub fn reof_minimize(rho_ab: &BipartiteState, order: RenyiOrder, opts: &ReofOptions) -> Result<Reof> {
    let spec = rho_ab.state.eig()?;
    let threshold = support_threshold(spec, SUPPORT_CUTOFF);
    let vectors: Vec<Vec<C64>> = (0..spec.dim())
        .rev()
        .filter(|&k| spec.eigenvalues[k] > threshold)
        .map(|k| {
            let s = spec.eigenvalues[k].sqrt();
            spec.eigenvectors.column(k).into_iter().map(|z| z * s).collect()
        })
        .collect();
    let r = vectors.len();
    let size = opts.ensemble_size.unwrap_or((r * r).min(16)).max(r);
    if opts.ensemble_size.is_some_and(|m| m < r) {
        return Err(Error::InvalidArgument(format!("ensemble size must be at least rank {r}")));
    }
    let problem = EnsembleProblem {
        vectors,
        dim_a: rho_ab.dim_a,
        dim_b: rho_ab.dim_b,
        size,
        order,
    };
    let n = 2 * size * r;
    let objective = |x: &[f64]| problem.average_entropy(x);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for k in 0..=opts.restarts {
        let x0: Vec<f64> = if k == 0 {
            (0..n).map(|i| if i % 2 == 0 && (i / 2) / r == (i / 2) % r { 1.0 } else { 0.0 }).collect()
        } else {
            let mut rng = stream(opts.seed, k as u64);
            (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
        };
        let m = minimize(objective, x0, opts.minimize);
        if m.value.is_finite() && best.as_ref().is_none_or(|b| m.value < b.1) {
            best = Some((m.x, m.value));
        }
        // entropies are non-negative, so a zero average cannot be improved
        if best.as_ref().is_some_and(|b| b.1 <= 1e-14) {
            break;
        }
    }
    let (x, value) = best.ok_or(Error::OptimizerNonConvergence { best: f64::INFINITY })?;
    Ok(Reof {
        value,
        ensemble: problem.ensemble(&x)?,
    })
}

/// `<psi|(N (x) id)(psi)|psi>` for the canonical purification `psi` of `rho`.
pub fn entanglement_fidelity(rho: &DensityMatrix, channel: &QuantumChannel) -> Result<f64> {
    if channel.dim_in() != rho.dim() || channel.dim_out() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: if channel.dim_in() != rho.dim() {
                channel.dim_in()
            } else {
                channel.dim_out()
            },
        });
    }
    let p = purify(rho)?;
    let out = channel.tensor_identity(p.dim_purifier).apply_linear(&p.state.projector())?;
    let psi = p.state.amplitudes();
    let v = out.mat_vec(psi);
    Ok(psi.iter().zip(&v).map(|(a, b)| a.conj() * b).sum::<C64>().re.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FeCheck {
    pub entanglement_fidelity: f64,
    /// `F(rho, N(rho))^2`
    pub fidelity_squared: f64,
    /// `F(rho, N(rho))^2 - F_e`
    pub bound_gap: f64,
    pub is_pure: bool,
}

pub fn fe_equality_check(rho: &DensityMatrix, channel: &QuantumChannel) -> Result<FeCheck> {
    let fe = entanglement_fidelity(rho, channel)?;
    let f = fidelity(rho, &channel.apply(rho)?)?;
    Ok(FeCheck {
        entanglement_fidelity: fe,
        fidelity_squared: f * f,
        bound_gap: f * f - fe,
        is_pure: rho.rank()? == 1,
    })
}

/// Entanglement fidelity through the purification and its image as
/// `F(psi, (N (x) id) psi)^2`.
pub fn entanglement_fidelity_via_purification(rho: &DensityMatrix, channel: &QuantumChannel) -> Result<f64> {
    let p = purify(rho)?;
    let psi = p.state.density();
    let out = channel.tensor_identity(p.dim_purifier).apply(psi.positive())?;
    let f = fidelity(psi.positive(), &out)?;
    Ok(f * f)
}
