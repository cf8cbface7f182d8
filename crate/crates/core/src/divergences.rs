//! Sandwiched and Petz Rényi divergences, relative entropy, max-divergence and
//! the variational functional whose optimizer drives the equality test.
//!
//! All logarithms are base 2. Matrix powers are taken on the support.

use std::f64::consts::LN_2;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::hermitian::support_threshold;
use crate::linalg::HermitianOperator;
use crate::states::{DensityMatrix, PositiveOperator};
use crate::tolerances::{SUPPORT_CUTOFF, SUPPORT_LEAK};

/// Validated Rényi parameter `alpha > 0` (finite).
///
/// `alpha = 1` is accepted; divergences dispatch to the relative entropy there
/// and routines that need `alpha != 1` reject it with [`Error::InvalidOrder`].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct RenyiOrder {
    alpha: f64,
}

impl RenyiOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::InvalidOrder {
                alpha,
                reason: "order must be finite and positive",
            });
        }
        Ok(Self { alpha })
    }

    pub fn alpha(self) -> f64 {
        self.alpha
    }

    /// `(1 - alpha) / (2 alpha)`
    pub fn gamma(self) -> f64 {
        (1.0 - self.alpha) / (2.0 * self.alpha)
    }

    pub fn is_one(self) -> bool {
        self.alpha == 1.0
    }

    /// `beta` with `1/alpha + 1/beta = 2`, defined for `alpha >= 1/2`;
    /// `alpha = 1/2` gives `+inf`.
    pub fn dual_beta(self) -> Option<f64> {
        if self.alpha < 0.5 {
            None
        } else if self.alpha == 0.5 {
            Some(f64::INFINITY)
        } else {
            Some(self.alpha / (2.0 * self.alpha - 1.0))
        }
    }

    /// The dual order as a finite `RenyiOrder`.
    pub fn dual(self) -> Result<RenyiOrder> {
        match self.dual_beta() {
            Some(b) if b.is_finite() => RenyiOrder::new(b),
            _ => Err(Error::InvalidOrder {
                alpha: self.alpha,
                reason: "dual order requires alpha > 1/2",
            }),
        }
    }

    pub(crate) fn require_not_one(self) -> Result<()> {
        if self.is_one() {
            return Err(Error::InvalidOrder {
                alpha: 1.0,
                reason: "order 1 has no Renyi form here",
            });
        }
        Ok(())
    }
}

impl TryFrom<f64> for RenyiOrder {
    type Error = Error;

    fn try_from(alpha: f64) -> Result<Self> {
        Self::new(alpha)
    }
}

impl<'de> Deserialize<'de> for RenyiOrder {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let alpha = f64::deserialize(d)?;
        RenyiOrder::new(alpha).map_err(de::Error::custom)
    }
}

/// How `supp rho` sits relative to `supp sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SupportCase {
    Contained,
    Overlapping,
    Disjoint,
}

/// Real number or `+inf`, serialized as a JSON number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(f64),
    Infinity,
}

impl Extended {
    pub fn to_f64(self) -> f64 {
        match self {
            Extended::Finite(v) => v,
            Extended::Infinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for Extended {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Extended::Finite(v) => s.serialize_f64(*v),
            Extended::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Extended {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Extended;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Extended, E> {
                Ok(Extended::Finite(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Extended, E> {
                Ok(Extended::Finite(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Extended, E> {
                Ok(Extended::Finite(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Extended, E> {
                if v == "inf" {
                    Ok(Extended::Infinity)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceValue {
    pub value: Extended,
    pub support_case: SupportCase,
}

impl DivergenceValue {
    fn finite(value: f64, support_case: SupportCase) -> Self {
        Self {
            value: Extended::Finite(value),
            support_case,
        }
    }

    fn infinite(support_case: SupportCase) -> Self {
        Self {
            value: Extended::Infinity,
            support_case,
        }
    }

    /// The value, with `+inf` mapped to `f64::INFINITY`.
    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn as_finite(&self) -> Option<f64> {
        match self.value {
            Extended::Finite(v) => Some(v),
            Extended::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.value == Extended::Infinity
    }
}

/// Classifies the supports by the weight `rho` puts outside and inside
/// `supp sigma`, relative to `tr rho`.
pub fn support_case(rho: &PositiveOperator, sigma: &PositiveOperator) -> Result<SupportCase> {
    check_dims(rho.dim(), sigma.dim())?;
    let p = sigma.support()?.projector;
    let total = rho.trace();
    let inside = rho.trace_product(&p);
    let outside = total - inside;
    Ok(if outside <= SUPPORT_LEAK * total {
        SupportCase::Contained
    } else if inside <= SUPPORT_LEAK * total {
        SupportCase::Disjoint
    } else {
        SupportCase::Overlapping
    })
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, found: b });
    }
    Ok(())
}

/// Whether the Rényi expressions are finite for this support case.
fn finite_branch(alpha: f64, case: SupportCase) -> bool {
    match case {
        SupportCase::Contained => true,
        SupportCase::Overlapping => alpha < 1.0,
        SupportCase::Disjoint => false,
    }
}

fn branch_error(alpha: f64, case: SupportCase) -> Error {
    if alpha < 1.0 && case == SupportCase::Disjoint {
        Error::DisjointSupports
    } else {
        Error::SupportViolation
    }
}

/// `ln tr M^p` over the eigenvalues of `M` above the support cutoff, in
/// log-sum-exp form so large `p` does not overflow. `-inf` for `M = 0`.
pub(crate) fn ln_trace_power(m: &HermitianOperator, p: f64) -> Result<f64> {
    let spec = m.eig()?;
    let threshold = support_threshold(spec, SUPPORT_CUTOFF);
    let kept: Vec<f64> = spec.eigenvalues.iter().copied().filter(|&l| l > threshold).collect();
    let Some(&top) = kept.last() else {
        return Ok(f64::NEG_INFINITY);
    };
    let sum: f64 = kept.iter().map(|&l| (l / top).powf(p)).sum();
    Ok(p * top.ln() + sum.ln())
}

/// `sigma^gamma rho sigma^gamma`
fn sandwich(rho: &PositiveOperator, sigma: &PositiveOperator, order: RenyiOrder) -> Result<HermitianOperator> {
    let s = sigma.power(order.gamma())?;
    Ok(rho.hermitian().congruence(s.matrix()))
}

fn ln_q_tilde_unchecked(rho: &PositiveOperator, sigma: &PositiveOperator, order: RenyiOrder) -> Result<f64> {
    ln_trace_power(&sandwich(rho, sigma, order)?, order.alpha())
}

/// `tr[(sigma^gamma rho sigma^gamma)^alpha]`
pub fn q_tilde(rho: &PositiveOperator, sigma: &PositiveOperator, order: RenyiOrder) -> Result<f64> {
    let case = support_case(rho, sigma)?;
    if !order.is_one() && !finite_branch(order.alpha(), case) {
        return Err(branch_error(order.alpha(), case));
    }
    Ok(ln_q_tilde_unchecked(rho, sigma, order)?.exp())
}

/// Sandwiched Rényi divergence `(1/(alpha-1)) log tr[(sigma^gamma rho sigma^gamma)^alpha]`.
pub fn srd(rho: &DensityMatrix, sigma: &PositiveOperator, order: RenyiOrder) -> Result<DivergenceValue> {
    srd_positive(rho.positive(), sigma, order)
}

/// As [`srd`] for an unnormalized first argument, including the
/// `(tr rho)^{-1}` normalization inside the logarithm.
pub fn srd_positive(rho: &PositiveOperator, sigma: &PositiveOperator, order: RenyiOrder) -> Result<DivergenceValue> {
    if order.is_one() {
        return qre_positive(rho, sigma);
    }
    let case = support_case(rho, sigma)?;
    if !finite_branch(order.alpha(), case) {
        return Ok(DivergenceValue::infinite(case));
    }
    let ln_q = ln_q_tilde_unchecked(rho, sigma, order)? - rho.trace().ln();
    Ok(finite_or_inf(ln_q / ((order.alpha() - 1.0) * LN_2), case))
}

fn finite_or_inf(v: f64, case: SupportCase) -> DivergenceValue {
    if v.is_finite() {
        DivergenceValue::finite(v, case)
    } else {
        DivergenceValue::infinite(case)
    }
}

/// Petz Rényi divergence `(1/(alpha-1)) log tr(rho^alpha sigma^{1-alpha})`.
pub fn rre(rho: &DensityMatrix, sigma: &PositiveOperator, order: RenyiOrder) -> Result<DivergenceValue> {
    if order.is_one() {
        return qre(rho, sigma);
    }
    let case = support_case(rho, sigma)?;
    let a = order.alpha();
    if !finite_branch(a, case) {
        return Ok(DivergenceValue::infinite(case));
    }
    let rho_a = rho.power(a)?;
    let sigma_b = sigma.power(1.0 - a)?;
    let q = rho_a.trace_product(&sigma_b) / rho.trace();
    Ok(finite_or_inf(q.ln() / ((a - 1.0) * LN_2), case))
}

/// `ln` on the support, zero elsewhere.
fn log_on_support(a: &HermitianOperator) -> Result<HermitianOperator> {
    let spec = a.eig()?;
    let threshold = support_threshold(spec, SUPPORT_CUTOFF);
    a.map_spectrum(|l| if l > threshold { l.ln() } else { 0.0 })
}

/// Quantum relative entropy `tr rho (log rho - log sigma)`.
pub fn qre(rho: &DensityMatrix, sigma: &PositiveOperator) -> Result<DivergenceValue> {
    qre_positive(rho.positive(), sigma)
}

fn qre_positive(rho: &PositiveOperator, sigma: &PositiveOperator) -> Result<DivergenceValue> {
    let case = support_case(rho, sigma)?;
    if case != SupportCase::Contained {
        return Ok(DivergenceValue::infinite(case));
    }
    let t = rho.trace();
    let neg_entropy = rho.trace_product(&log_on_support(rho)?);
    let cross = rho.trace_product(&log_on_support(sigma)?);
    Ok(DivergenceValue::finite((neg_entropy - cross) / t / LN_2, case))
}

/// Max-relative entropy `log lambda_max(sigma^{-1/2} rho sigma^{-1/2})`.
pub fn d_max(rho: &DensityMatrix, sigma: &PositiveOperator) -> Result<DivergenceValue> {
    let case = support_case(rho, sigma)?;
    if case != SupportCase::Contained {
        return Ok(DivergenceValue::infinite(case));
    }
    let s = sigma.power(-0.5)?;
    let m = rho.hermitian().congruence(s.matrix());
    let top = m.eig()?.max_eigenvalue();
    Ok(DivergenceValue::finite(top.log2(), case))
}

/// Classical Kullback-Leibler divergence in bits, with `0 log 0 = 0`.
pub fn kl(p: &[f64], q: &[f64]) -> Result<f64> {
    check_dims(p.len(), q.len())?;
    let mut acc = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Err(Error::AbsoluteContinuityViolation);
        }
        acc += pi * (pi / qi).log2();
    }
    Ok(acc)
}

/// Classical Rényi divergence `(1/(alpha-1)) log sum p^alpha q^{1-alpha}` of
/// probability vectors, `+inf` on the branches where the quantum versions are.
pub fn classical_renyi(p: &[f64], q: &[f64], order: RenyiOrder) -> Result<f64> {
    check_dims(p.len(), q.len())?;
    if order.is_one() {
        return kl(p, q).or(Ok(f64::INFINITY));
    }
    let a = order.alpha();
    let mut sum = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            if a > 1.0 {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        sum += pi.powf(a) * qi.powf(1.0 - a);
    }
    if sum == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(sum.log2() / (a - 1.0))
}

/// Positive semidefinite operator used as a test observable in the
/// variational form.
pub type ObservableCandidate = PositiveOperator;

/// `alpha tr(rho H) - (alpha-1) tr[(sigma^{-gamma} H sigma^{-gamma})^{alpha/(alpha-1)}]`
pub fn f_alpha(
    h: &ObservableCandidate,
    rho: &PositiveOperator,
    sigma: &PositiveOperator,
    order: RenyiOrder,
) -> Result<f64> {
    order.require_not_one()?;
    check_dims(h.dim(), rho.dim())?;
    let case = support_case(rho, sigma)?;
    let a = order.alpha();
    if !finite_branch(a, case) {
        return Err(branch_error(a, case));
    }
    let s = sigma.power(-order.gamma())?;
    let inner = h.hermitian().congruence(s.matrix());
    let second = ln_trace_power(&inner, a / (a - 1.0))?.exp();
    Ok(a * rho.trace_product(h) - (a - 1.0) * second)
}

/// `sigma^gamma (sigma^gamma rho sigma^gamma)^{alpha-1} sigma^gamma`, the
/// optimizer of [`f_alpha`].
pub fn h_hat(rho: &PositiveOperator, sigma: &PositiveOperator, order: RenyiOrder) -> Result<ObservableCandidate> {
    check_dims(rho.dim(), sigma.dim())?;
    let case = support_case(rho, sigma)?;
    let a = order.alpha();
    if !order.is_one() && !finite_branch(a, case) {
        return Err(branch_error(a, case));
    }
    let s = sigma.power(order.gamma())?;
    let m = rho.hermitian().congruence(s.matrix());
    let inner = m.power_on_support(a - 1.0)?;
    Ok(PositiveOperator::from_hermitian_unchecked(inner.congruence(s.matrix())))
}
