//! Rényi and von Neumann entropies and the sandwiched conditional entropy
//! `-min_{sigma_B} D_alpha(rho_AB || I_A (x) sigma_B)`.

use std::f64::consts::LN_2;

use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::divergences::{ln_trace_power, RenyiOrder};
use crate::error::{Error, Result};
use crate::linalg::hermitian::support_threshold;
use crate::linalg::{jacobi_eigh, trace_middle, ComplexMatrix, HermitianOperator, C64};
use crate::optimize::{minimize, MinimizeOptions};
use crate::rng::stream;
use crate::states::{purify, BipartiteState, DensityMatrix, PositiveOperator};
use crate::tolerances::SUPPORT_CUTOFF;

/// `S(rho) = -tr rho log rho`
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let spec = rho.eig()?;
    let threshold = support_threshold(spec, SUPPORT_CUTOFF);
    Ok(-spec
        .eigenvalues
        .iter()
        .filter(|&&l| l > threshold)
        .map(|&l| l * l.log2())
        .sum::<f64>())
}

/// `(1/(1-alpha)) log tr rho^alpha`; `alpha = 1` gives the von Neumann entropy.
pub fn renyi_entropy(rho: &DensityMatrix, order: RenyiOrder) -> Result<f64> {
    if order.is_one() {
        return von_neumann_entropy(rho);
    }
    let a = order.alpha();
    Ok(ln_trace_power(rho.hermitian(), a)? / ((1.0 - a) * LN_2))
}

/// `-log lambda_max(rho)`, the `alpha -> inf` limit.
pub fn min_entropy(rho: &DensityMatrix) -> Result<f64> {
    Ok(-rho.eig()?.max_eigenvalue().log2())
}

/// Rényi entropy for any `alpha` in `(0, inf]`.
pub fn renyi_entropy_extended(rho: &DensityMatrix, alpha: f64) -> Result<f64> {
    if alpha == f64::INFINITY {
        min_entropy(rho)
    } else {
        renyi_entropy(rho, RenyiOrder::new(alpha)?)
    }
}

/// `S(A|B) = S(AB) - S(B)`
pub fn conditional_entropy(rho_ab: &BipartiteState) -> Result<f64> {
    Ok(von_neumann_entropy(&rho_ab.state)? - von_neumann_entropy(&rho_ab.marginal_b())?)
}

/// Search settings for [`conditional_renyi`].
///
/// For `alpha > 1` the state is parameterized as `exp(L)/tr exp(L)`, whose
/// range is the interior where the objective is finite. For `alpha < 1` the
/// optimizer may be rank deficient, so `G G^dagger / tr G G^dagger` is used.
#[derive(Debug, Clone, Copy)]
pub struct ConditionalRenyiOptions {
    /// Maximum number of starts: the maximally mixed state on `supp rho_B`,
    /// then Gaussian parameters.
    pub restarts: usize,
    pub seed: u64,
    pub minimize: MinimizeOptions,
    /// Largest acceptable finite-difference gradient norm at the reported
    /// optimizer.
    pub grad_tol: f64,
}

impl Default for ConditionalRenyiOptions {
    fn default() -> Self {
        Self {
            restarts: 4,
            seed: 0,
            minimize: MinimizeOptions::default(),
            grad_tol: 1e-5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConditionalRenyi {
    pub value: f64,
    pub optimizer: DensityMatrix,
}

/// Hermitian `r x r` generator with `L_00 = 0`, from `r^2 - 1` reals.
fn generator(x: &[f64], r: usize) -> ComplexMatrix {
    let mut l = ComplexMatrix::zeros(r, r);
    for k in 1..r {
        l[(k, k)] = C64::new(x[k - 1], 0.0);
    }
    let mut pos = r - 1;
    for i in 0..r {
        for j in i + 1..r {
            let z = C64::new(x[pos], x[pos + 1]);
            l[(i, j)] = z;
            l[(j, i)] = z.conj();
            pos += 2;
        }
    }
    l
}

/// `(exp(L) / tr exp(L))^p`
fn gibbs_power(l: &ComplexMatrix, p: f64) -> Result<ComplexMatrix> {
    let spec = jacobi_eigh(l)?;
    let top = spec.max_eigenvalue();
    let w: Vec<f64> = spec.eigenvalues.iter().map(|&x| (x - top).exp()).collect();
    let z: f64 = w.iter().sum();
    Ok(spec.map(|x| ((x - top).exp() / z).powf(p)))
}

/// `(G G^dagger / tr G G^dagger)^p` for `G` read row-major from
/// interleaved real and imaginary parts; `p > 0`.
fn factor_power(x: &[f64], r: usize, p: f64) -> Result<ComplexMatrix> {
    let g = ComplexMatrix::from_fn(r, r, |i, j| C64::new(x[2 * (i * r + j)], x[2 * (i * r + j) + 1]));
    let s = g.matmul(&g.adjoint());
    let t = s.trace().re;
    let spec = jacobi_eigh(&s)?;
    Ok(spec.map(|l| (l.max(0.0) / t).powf(p)))
}

struct ConditionalProblem<'a> {
    rho: &'a HermitianOperator,
    dim_a: usize,
    /// Orthonormal basis of `supp rho_B` (columns).
    basis: ComplexMatrix,
    order: RenyiOrder,
}

impl ConditionalProblem<'_> {
    fn rank(&self) -> usize {
        self.basis.cols()
    }

    fn sigma(&self, x: &[f64], p: f64) -> Result<ComplexMatrix> {
        let r = self.rank();
        let inner = if self.order.alpha() < 1.0 {
            factor_power(x, r, p)?
        } else {
            gibbs_power(&generator(x, r), p)?
        };
        Ok(self.basis.matmul(&inner).matmul(&self.basis.adjoint()))
    }

    fn param_count(&self) -> usize {
        let r = self.rank();
        if self.order.alpha() < 1.0 {
            2 * r * r
        } else {
            r * r - 1
        }
    }

    /// `D_alpha(rho_AB || I (x) sigma_B(x))` in bits.
    fn divergence(&self, x: &[f64]) -> Result<f64> {
        let a = self.order.alpha();
        let s = ComplexMatrix::identity(self.dim_a).kron(&self.sigma(x, self.order.gamma())?);
        let m = self.rho.congruence(&s);
        Ok(ln_trace_power(&m, a)? / ((a - 1.0) * LN_2))
    }
}

/// Sandwiched conditional Rényi entropy and an optimizing `sigma_B`, for
/// `alpha >= 1/2`. The search runs over full-rank states on `supp rho_B`.
pub fn conditional_renyi(
    rho_ab: &BipartiteState,
    order: RenyiOrder,
    opts: &ConditionalRenyiOptions,
) -> Result<ConditionalRenyi> {
    if order.alpha() < 0.5 {
        return Err(Error::InvalidOrder {
            alpha: order.alpha(),
            reason: "conditional entropy needs alpha >= 1/2",
        });
    }
    let rho_b = rho_ab.marginal_b();
    if order.is_one() {
        return Ok(ConditionalRenyi {
            value: conditional_entropy(rho_ab)?,
            optimizer: rho_b,
        });
    }
    let problem = ConditionalProblem {
        rho: rho_ab.state.hermitian(),
        dim_a: rho_ab.dim_a,
        basis: rho_b.support()?.basis,
        order,
    };
    let n = problem.param_count();
    let factor = order.alpha() < 1.0;
    let objective = |x: &[f64]| problem.divergence(x).unwrap_or(f64::INFINITY);

    // the objective is convex in sigma_B, so later starts only run when a
    // start ends away from a stationary point
    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    for k in 0..opts.restarts.max(1) {
        let x0: Vec<f64> = if k == 0 {
            if factor {
                let r = problem.rank();
                (0..n).map(|i| if i % 2 == 0 && (i / 2) % (r + 1) == 0 { 1.0 } else { 0.0 }).collect()
            } else {
                vec![0.0; n]
            }
        } else {
            let mut rng = stream(opts.seed, k as u64);
            (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
        };
        let m = minimize(objective, x0, opts.minimize);
        let stationary = m.value.is_finite() && gradient_norm(&objective, &m.x) <= opts.grad_tol;
        if best.as_ref().is_none_or(|b| m.value < b.1) {
            best = Some((m.x, m.value, stationary));
        }
        if stationary {
            break;
        }
    }
    let (x, d, stationary) = best.expect("at least one restart");
    if !stationary {
        return Err(Error::OptimizerNonConvergence { best: -d });
    }
    let sigma = HermitianOperator::from_matrix_unchecked(problem.sigma(&x, 1.0)?);
    Ok(ConditionalRenyi {
        value: -d,
        optimizer: DensityMatrix::from_positive_unchecked(PositiveOperator::from_hermitian_unchecked(sigma)),
    })
}

fn gradient_norm(f: &impl Fn(&[f64]) -> f64, x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let g = finitediff::vec::diff::central_diff_vec(x, &|p: &Vec<f64>| Ok(f(p)))
        .expect("objective is infallible");
    g.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `S_alpha(A|B)` of `rho_AB` and `S_beta(A|C)` of a purification `rho_ABC`
/// with `1/alpha + 1/beta = 2`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DualityReport {
    pub alpha: f64,
    pub beta: f64,
    pub s_alpha_a_given_b: f64,
    pub s_beta_a_given_c: f64,
    pub gap: f64,
}

/// `|S_alpha(A|B) + S_beta(A|C)|` over the canonical purification.
pub fn duality_gap(rho_ab: &BipartiteState, order: RenyiOrder, opts: &ConditionalRenyiOptions) -> Result<DualityReport> {
    let beta = order.dual()?;
    let purification = purify(&rho_ab.state)?;
    let dim_c = purification.dim_purifier;
    let abc = purification.state.projector();
    let ac = trace_middle(&abc, rho_ab.dim_a, rho_ab.dim_b, dim_c)?;
    let rho_ac = BipartiteState::new(DensityMatrix::new(ac)?, rho_ab.dim_a, dim_c)?;
    let lhs = conditional_renyi(rho_ab, order, opts)?.value;
    let rhs = conditional_renyi(&rho_ac, beta, opts)?.value;
    Ok(DualityReport {
        alpha: order.alpha(),
        beta: beta.alpha(),
        s_alpha_a_given_b: lhs,
        s_beta_a_given_c: rhs,
        gap: (lhs + rhs).abs(),
    })
}
