//! Seeded property suites. Every trial draws from its own ChaCha stream
//! `(seed, population << 32 | trial)`, so reports do not depend on how
//! rayon schedules the work.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use srd_core::channels::{measurement_channel, partial_trace_channel, random_channel, QuantumChannel};
use srd_core::divergences::{f_alpha, h_hat, q_tilde, qre, rre, srd, RenyiOrder};
use srd_core::dpi::{
    dpi_check, dpi_violation_search, equality_residual, equality_residual_with, fidelity_attaining_measurement,
    sufficiency_test, AdjointRoute, ViolationSearchOptions,
};
use srd_core::entanglement::{
    araki_lieb_renyi, fe_equality_check, reof_lower_bound, reof_minimize, saturating_state, SaturatingSpec,
};
use srd_core::entropy::{conditional_renyi, duality_gap, renyi_entropy, ConditionalRenyiOptions};
use srd_core::linalg::{ComplexMatrix, Keep, C64};
use srd_core::rng::{gaussian_matrix, gaussian_vector, random_unitary, stream, StreamRng};
use srd_core::states::{random_density, random_pure, BipartiteState, DensityMatrix, PositiveOperator, PureState};
use srd_core::tolerances::{CROSS_TOL, EQ_TOL};

use crate::io::{num, CliError, CliResult};

pub struct SuiteSpec {
    pub name: &'static str,
    pub about: &'static str,
    default_trials: usize,
    default_dims: &'static [usize],
    tolerances: &'static [(&'static str, f64)],
    run: fn(&Ctx) -> Outcome,
}

pub struct Ctx {
    pub seed: u64,
    pub trials: usize,
    pub dims: Vec<usize>,
    pub alpha: Option<f64>,
    tol: BTreeMap<String, f64>,
}

impl Ctx {
    fn tol(&self, key: &str) -> f64 {
        self.tol[key]
    }

    fn rng(&self, population: u64, trial: usize) -> StreamRng {
        stream(self.seed, (population << 32) | trial as u64)
    }

    fn alphas(&self, defaults: &[f64]) -> Vec<f64> {
        self.alpha.map_or_else(|| defaults.to_vec(), |a| vec![a])
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub trial: usize,
    pub quantities: BTreeMap<String, Value>,
    pub residuals: BTreeMap<String, Value>,
}

fn failure(trial: usize, quantities: &[(&str, f64)], residuals: &[(&str, f64)]) -> Failure {
    let map = |xs: &[(&str, f64)]| xs.iter().map(|(k, v)| (k.to_string(), num(*v))).collect();
    Failure {
        trial,
        quantities: map(quantities),
        residuals: map(residuals),
    }
}

#[derive(Default)]
struct Outcome {
    summary: BTreeMap<String, Value>,
    failures: Vec<Failure>,
}

impl Outcome {
    fn stat(&mut self, key: &str, v: f64) {
        self.summary.insert(key.to_string(), num(v));
    }
}

#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    pub dims: Vec<usize>,
    pub alpha: Option<f64>,
    pub tolerances: BTreeMap<String, f64>,
    pub summary: BTreeMap<String, Value>,
    pub failures: Vec<Failure>,
    pub passed: bool,
    pub wall_time_s: f64,
    pub version: &'static str,
}

pub fn find(name: &str) -> Option<&'static SuiteSpec> {
    SUITES.iter().find(|s| s.name == name)
}

pub fn names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.name).collect()
}

pub fn run(
    spec: &SuiteSpec,
    seed: u64,
    trials: Option<usize>,
    dims: Option<Vec<usize>>,
    alpha: Option<f64>,
    overrides: &[(String, f64)],
) -> CliResult<SuiteReport> {
    let mut tol: BTreeMap<String, f64> = spec.tolerances.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    for (k, v) in overrides {
        match tol.get_mut(k) {
            Some(slot) => *slot = *v,
            None => {
                return Err(CliError::Parse(format!(
                    "suite {} has no tolerance {k:?}; known: {}",
                    spec.name,
                    spec.tolerances.iter().map(|t| t.0).collect::<Vec<_>>().join(", ")
                )))
            }
        }
    }
    let dims = dims.unwrap_or_else(|| spec.default_dims.to_vec());
    if dims.len() != spec.default_dims.len() || dims.iter().any(|d| !(2..=8).contains(d)) {
        return Err(CliError::Precondition(format!(
            "suite {} takes {} dimension(s), each in 2..=8",
            spec.name,
            spec.default_dims.len()
        )));
    }
    if let Some(a) = alpha {
        RenyiOrder::new(a)?;
    }
    let ctx = Ctx {
        seed,
        trials: trials.unwrap_or(spec.default_trials).max(1),
        dims,
        alpha,
        tol,
    };
    let start = Instant::now();
    let outcome = (spec.run)(&ctx);
    Ok(SuiteReport {
        suite: spec.name.to_string(),
        seed,
        trials: ctx.trials,
        dims: ctx.dims,
        alpha,
        tolerances: ctx.tol,
        summary: outcome.summary,
        passed: outcome.failures.is_empty(),
        failures: outcome.failures,
        wall_time_s: start.elapsed().as_secs_f64(),
        version: env!("CARGO_PKG_VERSION"),
    })
}

fn order(a: f64) -> RenyiOrder {
    RenyiOrder::new(a).expect("suite orders are valid")
}

fn probability<R: Rng>(d: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = gaussian_vector(d, rng).iter().map(|z| z.norm_sqr()).collect();
    let t: f64 = w.iter().sum();
    w.iter().map(|x| x / t).collect()
}

fn channel<R: Rng>(din: usize, dout: usize, rng: &mut R) -> QuantumChannel {
    let min = din.div_ceil(dout);
    let n = rng.random_range(min..=min + 2);
    random_channel(din, dout, n, rng).expect("enough Kraus operators")
}

fn max_of(xs: impl Iterator<Item = f64>) -> f64 {
    xs.fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(xs: impl Iterator<Item = f64>) -> f64 {
    xs.fold(f64::INFINITY, f64::min)
}

fn error_failure(trial: usize, e: &srd_core::Error) -> Failure {
    let mut f = failure(trial, &[], &[]);
    f.quantities.insert("error".into(), Value::from(e.to_string()));
    f
}

fn dpi_holds(ctx: &Ctx) -> Outcome {
    let alphas = ctx.alphas(&[0.5, 0.75, 1.5, 2.0, 3.0]);
    let max_dim = ctx.dims[0];
    let tol = ctx.tol("gap_tol");
    let rows: Vec<(usize, f64, Result<f64, srd_core::Error>)> = (0..alphas.len() * ctx.trials)
        .into_par_iter()
        .map(|i| {
            let a = alphas[i / ctx.trials];
            let mut rng = ctx.rng(0, i);
            let din = rng.random_range(2..=max_dim);
            let dout = rng.random_range(2..=max_dim);
            let rho = random_density(din, rng.random_range(1..=din), &mut rng);
            let sigma_rank = if a > 1.0 { din } else { rng.random_range(1..=din) };
            let sigma = random_density(din, sigma_rank, &mut rng);
            let ch = channel(din, dout, &mut rng);
            (i, a, dpi_check(&rho, &sigma, &ch, order(a)).map(|r| r.gap))
        })
        .collect();
    let mut out = Outcome::default();
    for (i, a, r) in &rows {
        match r {
            Ok(g) if *g < -tol => out.failures.push(failure(*i, &[("alpha", *a), ("gap", *g)], &[("violation", -g)])),
            Err(e) => out.failures.push(error_failure(*i, e)),
            _ => {}
        }
    }
    out.stat("min_gap", min_of(rows.iter().filter_map(|r| r.2.as_ref().ok().copied())));
    out.stat("instances", rows.len() as f64);
    out
}

fn constructed_instance(rng: &mut StreamRng, unitary: bool) -> (DensityMatrix, DensityMatrix, QuantumChannel) {
    if unitary {
        let d = rng.random_range(2..=5);
        let rho = random_density(d, d, rng);
        let sigma = random_density(d, d, rng);
        (rho, sigma, QuantumChannel::unitary(random_unitary(d, rng)))
    } else {
        let (da, db) = (rng.random_range(2..=3), rng.random_range(2..=3));
        let tau = random_density(db, db, rng);
        let rho = random_density(da, da, rng).tensor(&tau);
        let sigma = random_density(da, da, rng).tensor(&tau);
        (rho, sigma, partial_trace_channel(da, db, Keep::A))
    }
}

fn generic_instance(rng: &mut StreamRng) -> (DensityMatrix, DensityMatrix, QuantumChannel) {
    let d = rng.random_range(2..=4);
    let rho = random_density(d, d, rng);
    let sigma = random_density(d, d, rng);
    (rho, sigma, channel(d, rng.random_range(2..=4), rng))
}

/// (trial, constructed, alpha, gap, relative residual, equal)
type EqualityRow = (usize, bool, f64, f64, f64, bool);

fn equality(ctx: &Ctx) -> Outcome {
    let alphas = ctx.alphas(&[0.5, 0.75, 1.5, 2.0, 3.0]);
    let (eq_tol, cross_tol) = (ctx.tol("eq_tol"), ctx.tol("cross_tol"));
    let (min_res, min_gap) = (ctx.tol("generic_residual"), ctx.tol("generic_gap"));
    // generic instances are kept only when their gap exceeds `generic_gap`
    let rows: Vec<Option<EqualityRow>> = (0..2 * ctx.trials)
        .into_par_iter()
        .map(|i| {
            let constructed = i < ctx.trials;
            let a = alphas[i % alphas.len()];
            let mut rng = ctx.rng(if constructed { 0 } else { 1 }, i);
            let (rho, sigma, ch) = if constructed {
                constructed_instance(&mut rng, i % 2 == 0)
            } else {
                generic_instance(&mut rng)
            };
            let gap = dpi_check(&rho, &sigma, &ch, order(a)).ok()?.gap;
            if !constructed && gap <= min_gap {
                return None;
            }
            let cert = srd_core::dpi::equality_residual_with(&rho, &sigma, &ch, order(a), AdjointRoute::Kraus, eq_tol).ok()?;
            let rel = cert.residual / cert.lhs_operator.max_abs().max(1.0);
            Some((i, constructed, a, gap, rel, cert.is_equal()))
        })
        .collect();
    let mut out = Outcome::default();
    let kept: Vec<_> = rows.into_iter().flatten().collect();
    for &(i, constructed, a, gap, rel, equal) in &kept {
        let bad = if constructed {
            rel > eq_tol || gap.abs() > cross_tol || !equal
        } else {
            rel <= min_res || equal
        };
        if bad || equal != (gap.abs() <= cross_tol) {
            out.failures.push(failure(
                i,
                &[("alpha", a), ("gap", gap), ("constructed", f64::from(u8::from(constructed)))],
                &[("relative_residual", rel)],
            ));
        }
    }
    out.stat("constructed_max_residual", max_of(kept.iter().filter(|r| r.1).map(|r| r.4)));
    out.stat("constructed_max_abs_gap", max_of(kept.iter().filter(|r| r.1).map(|r| r.3.abs())));
    out.stat("generic_min_residual", min_of(kept.iter().filter(|r| !r.1).map(|r| r.4)));
    out.stat("generic_instances", kept.iter().filter(|r| !r.1).count() as f64);
    out
}

fn stinespring(ctx: &Ctx) -> Outcome {
    let tol = ctx.tol("route_tol");
    let rows: Vec<(usize, f64)> = (0..ctx.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ctx.rng(0, i);
            let (rho, sigma, ch) = generic_instance(&mut rng);
            let a = ctx.alpha.unwrap_or([0.75, 2.0][i % 2]);
            let diff = equality_residual(&rho, &sigma, &ch, order(a)).and_then(|k| {
                let s = equality_residual_with(&rho, &sigma, &ch, order(a), AdjointRoute::Stinespring, EQ_TOL)?;
                Ok(k.rhs_operator.max_diff(&s.rhs_operator))
            });
            (i, diff.unwrap_or(f64::INFINITY))
        })
        .collect();
    let mut out = Outcome {
        failures: rows.iter().filter(|r| !(r.1 <= tol)).map(|r| failure(r.0, &[], &[("route_difference", r.1)])).collect(),
        ..Default::default()
    };
    out.stat("max_route_difference", max_of(rows.iter().map(|r| r.1)));
    out
}

fn variational(ctx: &Ctx) -> Outcome {
    let tol = ctx.tol("tol");
    let d = ctx.dims[0];
    let mut out = Outcome::default();
    let (mut fit, mut beat) = (0.0_f64, f64::NEG_INFINITY);
    for (j, a) in ctx.alphas(&[0.75, 2.0]).into_iter().enumerate() {
        if a == 1.0 {
            continue;
        }
        let mut rng = ctx.rng(j as u64, 0);
        let rho = random_density(d, d, &mut rng);
        let sigma = random_density(d, d, &mut rng);
        let (Ok(q), Ok(h)) = (q_tilde(&rho, &sigma, order(a)), h_hat(&rho, &sigma, order(a))) else {
            continue;
        };
        let f = f_alpha(&h, &rho, &sigma, order(a)).unwrap_or(f64::NAN);
        fit = fit.max((f - q).abs());
        if !((f - q).abs() <= tol) {
            out.failures.push(failure(0, &[("alpha", a), ("q_tilde", q), ("f_at_optimizer", f)], &[("fit", (f - q).abs())]));
        }
        for i in 0..ctx.trials {
            let mut rng = ctx.rng(100 + j as u64, i);
            let g = gaussian_matrix(d, d, &mut rng);
            let scale: f64 = rng.random_range(0.1..3.0);
            let Ok(cand) = PositiveOperator::from_matrix(g.matmul(&g.adjoint()).scale_real(scale / d as f64).hermitian_part())
            else {
                continue;
            };
            let v = f_alpha(&cand, &rho, &sigma, order(a)).unwrap_or(f64::NAN);
            let b = if a > 1.0 { v - q } else { q - v };
            beat = beat.max(b);
            if !(b <= tol) {
                out.failures.push(failure(i, &[("alpha", a), ("f", v), ("q_tilde", q)], &[("improvement", b)]));
            }
        }
    }
    out.stat("max_fit_error", fit);
    out.stat("max_improvement", beat);
    out
}

fn cq_instance(rng: &mut StreamRng) -> (DensityMatrix, DensityMatrix, QuantumChannel) {
    let (dx, dt) = (2, 2);
    let taus: Vec<DensityMatrix> = (0..dx).map(|_| random_density(dt, dt, rng)).collect();
    let build = |p: &[f64]| {
        let mut m = ComplexMatrix::zeros(dx * dt, dx * dt);
        for (x, tau) in taus.iter().enumerate() {
            let mut e = vec![0.0; dx];
            e[x] = p[x];
            m += &ComplexMatrix::from_diag(&e).kron(tau.matrix());
        }
        DensityMatrix::new(m).expect("valid state")
    };
    let p = probability(dx, rng);
    let q = probability(dx, rng);
    (build(&p), build(&q), partial_trace_channel(dx, dt, Keep::A))
}

fn sufficiency(ctx: &Ctx) -> Outcome {
    let tol = ctx.tol("gap_tol");
    let rows: Vec<(usize, bool, bool, f64)> = (0..ctx.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ctx.rng(0, i);
            let (rho, sigma, ch) = match i % 4 {
                0 => constructed_instance(&mut rng, true),
                1 => constructed_instance(&mut rng, false),
                2 => cq_instance(&mut rng),
                _ => generic_instance(&mut rng),
            };
            let suff = sufficiency_test(&rho, &sigma, &ch).unwrap_or(false);
            let eq = equality_residual(&rho, &sigma, &ch, order(2.0)).map(|c| c.is_equal()).unwrap_or(true);
            let gap = if suff {
                max_of([1.5, 2.0, 3.0].into_iter().map(|a| {
                    dpi_check(&rho, &sigma, &ch, order(a)).map_or(f64::INFINITY, |r| r.gap.abs())
                }))
            } else {
                0.0
            };
            (i, suff, eq, gap)
        })
        .collect();
    let mut out = Outcome::default();
    for &(i, suff, eq, gap) in &rows {
        if suff != eq || gap > tol {
            out.failures.push(failure(
                i,
                &[("sufficient", f64::from(u8::from(suff))), ("equal_at_2", f64::from(u8::from(eq)))],
                &[("max_abs_gap", gap)],
            ));
        }
    }
    out.stat("sufficient_instances", rows.iter().filter(|r| r.1).count() as f64);
    out.stat("max_abs_gap_when_sufficient", max_of(rows.iter().map(|r| r.3)));
    out
}

fn fidelity_measurement(ctx: &Ctx) -> Outcome {
    let tol = ctx.tol("gap_tol");
    let rows: Vec<(usize, f64, bool, f64)> = (0..ctx.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ctx.rng(0, i);
            let rho = random_density(2, 2, &mut rng);
            let sigma = random_density(2, 2, &mut rng);
            let comm = (&rho.matmul(&sigma) - &sigma.matmul(&rho)).max_abs();
            let res = fidelity_attaining_measurement(&rho, &sigma).and_then(|m| {
                let meas = measurement_channel(&m.povm)?;
                Ok((dpi_check(&rho, &sigma, &meas, order(0.5))?.gap, sufficiency_test(&rho, &sigma, &meas)?))
            });
            let (gap, suff) = res.unwrap_or((f64::INFINITY, true));
            (i, gap, suff, comm)
        })
        .collect();
    let mut out = Outcome::default();
    for &(i, gap, suff, comm) in &rows {
        if !(gap.abs() <= tol) || suff {
            out.failures.push(failure(
                i,
                &[("gap", gap), ("sufficient", f64::from(u8::from(suff))), ("commutator", comm)],
                &[("abs_gap", gap.abs())],
            ));
        }
    }
    out.stat("max_abs_gap", max_of(rows.iter().map(|r| r.1.abs())));
    out
}

fn random_bipartite(rng: &mut StreamRng, da: usize, db: usize) -> BipartiteState {
    let rho = random_density(da * db, rng.random_range(1..=da * db), rng);
    BipartiteState::new(rho, da, db).expect("dims match")
}

fn duality(ctx: &Ctx) -> Outcome {
    let alphas = ctx.alphas(&[2.0, 3.0, 0.75]);
    let tol = ctx.tol("gap_tol");
    let opts = ConditionalRenyiOptions::default();
    let rows: Vec<(usize, f64, Result<f64, srd_core::Error>)> = (0..alphas.len() * ctx.trials)
        .into_par_iter()
        .map(|i| {
            let t = i % ctx.trials;
            let a = alphas[i / ctx.trials];
            let mut rng = ctx.rng(0, t);
            let rho = random_bipartite(&mut rng, ctx.dims[0], ctx.dims[1]);
            (t, a, duality_gap(&rho, order(a), &opts).map(|r| r.gap))
        })
        .collect();
    let mut out = Outcome::default();
    for (t, a, r) in &rows {
        match r {
            Ok(g) if *g > tol => out.failures.push(failure(*t, &[("alpha", *a)], &[("duality_gap", *g)])),
            Err(e) => out.failures.push(error_failure(*t, e)),
            _ => {}
        }
    }
    out.stat("max_gap", max_of(rows.iter().filter_map(|r| r.2.as_ref().ok().copied())));
    out
}

fn random_saturating(rng: &mut StreamRng, r_a: usize, r_ab: usize) -> BipartiteState {
    let spec = SaturatingSpec::minimal(
        probability(r_ab, rng).iter().map(|x| 0.9 * x + 0.1 / r_ab as f64).collect(),
        probability(r_a, rng).iter().map(|x| 0.9 * x + 0.1 / r_a as f64).collect(),
    );
    saturating_state(&spec).expect("valid spec")
}

fn araki_lieb(ctx: &Ctx) -> Outcome {
    let alphas = ctx.alphas(&[0.5, 0.75, 2.0, 3.0]);
    let (slack, sat_tol) = (ctx.tol("slack"), ctx.tol("saturation_tol"));
    let opts = ConditionalRenyiOptions::default();
    let rows: Vec<(usize, f64, Result<f64, srd_core::Error>)> = (0..alphas.len() * ctx.trials)
        .into_par_iter()
        .map(|i| {
            let t = i % ctx.trials;
            let a = alphas[i / ctx.trials];
            let mut rng = ctx.rng(0, t);
            let rho = random_bipartite(&mut rng, ctx.dims[0], ctx.dims[1]);
            let r = araki_lieb_renyi(&rho, order(a), &opts).map(|r| (r.lower - r.value).max(r.value - r.upper));
            (t, a, r)
        })
        .collect();
    let mut out = Outcome::default();
    for (t, a, r) in &rows {
        match r {
            Ok(v) if *v > slack => out.failures.push(failure(*t, &[("alpha", *a)], &[("sandwich_violation", *v)])),
            Err(e) => out.failures.push(error_failure(*t, e)),
            _ => {}
        }
    }
    let sat: Vec<(usize, f64)> = (0..ctx.trials.min(20))
        .into_par_iter()
        .map(|i| {
            let mut rng = ctx.rng(1, i);
            let st = random_saturating(&mut rng, 2 + i % 2, 1 + (i / 2) % 2);
            let v = conditional_renyi(&st, order(2.0 / 3.0), &opts)
                .and_then(|c| Ok(c.value + renyi_entropy(&st.marginal_a(), order(2.0))?))
                .map_or(f64::INFINITY, f64::abs);
            (i, v)
        })
        .collect();
    for &(i, v) in &sat {
        if !(v <= sat_tol) {
            out.failures.push(failure(i, &[("saturating", 1.0)], &[("saturation_residual", v)]));
        }
    }
    out.stat("max_sandwich_violation", max_of(rows.iter().filter_map(|r| r.2.as_ref().ok().copied())));
    out.stat("max_saturation_residual", max_of(sat.iter().map(|r| r.1)));
    out
}

fn reof(ctx: &Ctx) -> Outcome {
    let (tol, bell_tol, product_tol) = (ctx.tol("saturating_tol"), ctx.tol("bell_tol"), ctx.tol("product_tol"));
    let copts = ConditionalRenyiOptions::default();
    let mut out = Outcome::default();
    let sat: Vec<(usize, f64, f64)> = (0..ctx.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ctx.rng(0, i);
            let st = random_saturating(&mut rng, 2, 2);
            let res = (|| {
                let v = reof_minimize(&st, order(2.0), &Default::default())?.value;
                let target = -conditional_renyi(&st, order(2.0 / 3.0), &copts)?.value;
                let bound = reof_lower_bound(&st, order(2.0), &copts)?;
                Ok::<_, srd_core::Error>(((v - target).abs(), bound - v))
            })();
            let (d, o) = res.unwrap_or((f64::INFINITY, f64::INFINITY));
            (i, d, o)
        })
        .collect();
    for &(i, d, o) in &sat {
        if !(d <= tol) || o > 1e-6 {
            out.failures.push(failure(i, &[("saturating", 1.0)], &[("deviation", d), ("bound_excess", o)]));
        }
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = C64::new(0.0, 0.0);
    let bell = PureState::new(vec![C64::new(h, 0.0), z, z, C64::new(h, 0.0)]).expect("unit vector");
    let bell = BipartiteState::new(bell.density(), 2, 2).expect("dims match");
    let bell_err = reof_minimize(&bell, order(2.0), &Default::default()).map_or(f64::INFINITY, |r| (r.value - 1.0).abs());
    if !(bell_err <= bell_tol) {
        out.failures.push(failure(0, &[("bell", 1.0)], &[("deviation", bell_err)]));
    }
    let products: Vec<(usize, f64)> = (0..ctx.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ctx.rng(1, i);
            let a = random_density(2, 2, &mut rng);
            let b = random_density(2, 2, &mut rng);
            let v = reof_minimize(&BipartiteState::product(&a, &b), order(2.0), &Default::default());
            (i, v.map_or(f64::INFINITY, |r| r.value.abs()))
        })
        .collect();
    for &(i, v) in &products {
        if !(v <= product_tol) {
            out.failures.push(failure(i, &[("product", 1.0)], &[("value", v)]));
        }
    }
    out.stat("saturating_max_deviation", max_of(sat.iter().map(|r| r.1)));
    out.stat("bell_deviation", bell_err);
    out.stat("product_max_value", max_of(products.iter().map(|r| r.1)));
    out
}

fn entanglement_fidelity(ctx: &Ctx) -> Outcome {
    let (pure_tol, mixed_gap) = (ctx.tol("pure_tol"), ctx.tol("mixed_gap"));
    let rows: Vec<(usize, bool, f64)> = (0..3 * ctx.trials)
        .into_par_iter()
        .map(|i| {
            let pure = i < ctx.trials;
            let mut rng = ctx.rng(if pure { 0 } else { 1 }, i);
            let d = rng.random_range(2..=ctx.dims[0]);
            let rho = if pure {
                random_pure(d, &mut rng).density()
            } else {
                random_density(d, rng.random_range(2..=d), &mut rng)
            };
            let gap = fe_equality_check(&rho, &channel(d, d, &mut rng)).map_or(f64::NAN, |c| c.bound_gap);
            (i, pure, gap)
        })
        .collect();
    let mut out = Outcome::default();
    for &(i, pure, gap) in &rows {
        let ok = if pure { gap.abs() <= pure_tol } else { gap > mixed_gap };
        if !ok {
            out.failures.push(failure(i, &[("pure", f64::from(u8::from(pure)))], &[("bound_gap", gap)]));
        }
    }
    out.stat("pure_max_abs_gap", max_of(rows.iter().filter(|r| r.1).map(|r| r.2.abs())));
    out.stat("mixed_min_gap", min_of(rows.iter().filter(|r| !r.1).map(|r| r.2)));
    out
}

fn violation_below_half(ctx: &Ctx) -> Outcome {
    let alpha = ctx.alpha.unwrap_or(0.3);
    let opts = ViolationSearchOptions {
        trials: ctx.trials,
        seed: ctx.seed,
        ..Default::default()
    };
    let mut out = Outcome::default();
    let (below, control) = rayon::join(|| dpi_violation_search(alpha, &opts), || dpi_violation_search(0.5, &opts));
    match (below, control) {
        (Ok(b), Ok(c)) => {
            out.stat("gap", b.gap);
            out.stat("sampled_gap", b.sampled_gap);
            out.stat("best_trial", b.trial as f64);
            out.stat("control_gap", c.gap);
            if !(b.gap < -ctx.tol("violation_tol")) {
                out.failures.push(failure(b.trial, &[("alpha", alpha), ("gap", b.gap)], &[("gap", b.gap)]));
            }
            if c.gap < -ctx.tol("control_tol") {
                out.failures.push(failure(c.trial, &[("alpha", 0.5), ("gap", c.gap)], &[("gap", c.gap)]));
            }
        }
        (Err(e), _) | (_, Err(e)) => out.failures.push(error_failure(0, &e)),
    }
    out
}

fn classical_oracle(p: &[f64], q: &[f64], a: f64) -> f64 {
    let terms = p.iter().zip(q).filter(|(x, _)| **x > 0.0);
    if a == 1.0 {
        terms.map(|(x, y)| x * (x / y).log2()).sum()
    } else {
        terms.map(|(x, y)| x.powf(a) * y.powf(1.0 - a)).sum::<f64>().log2() / (a - 1.0)
    }
}

fn classical(ctx: &Ctx) -> Outcome {
    let (tol, cont_tol) = (ctx.tol("oracle_tol"), ctx.tol("continuity_tol"));
    let alphas = ctx.alphas(&[0.3, 0.5, 0.75, 1.5, 2.0, 3.0]);
    let mut out = Outcome::default();
    let mut worst: f64 = 0.0;
    for i in 0..ctx.trials {
        let mut rng = ctx.rng(0, i);
        let d = rng.random_range(2..=ctx.dims[0]);
        let mut p = probability(d, &mut rng);
        if i % 3 == 0 {
            p[1] += p[0];
            p[0] = 0.0;
        }
        let q = probability(d, &mut rng);
        let u = random_unitary(d, &mut rng);
        let rot = |x: &[f64]| DensityMatrix::new(u.matmul(&ComplexMatrix::from_diag(x)).matmul(&u.adjoint()).hermitian_part());
        let (Ok(rho), Ok(sigma)) = (rot(&p), rot(&q)) else { continue };
        for &a in alphas.iter().chain([1.0].iter()) {
            let oracle = classical_oracle(&p, &q, a);
            let got = if a == 1.0 {
                vec![qre(&rho, sigma.positive()).map(|v| v.to_f64())]
            } else {
                vec![
                    srd(&rho, &sigma, order(a)).map(|v| v.to_f64()),
                    rre(&rho, &sigma, order(a)).map(|v| v.to_f64()),
                ]
            };
            for g in got {
                let e = g.map_or(f64::INFINITY, |v| (v - oracle).abs());
                worst = worst.max(e);
                if !(e <= tol) {
                    out.failures.push(failure(i, &[("alpha", a), ("oracle", oracle)], &[("error", e)]));
                }
            }
        }
    }
    let mut worst_cont: f64 = 0.0;
    for i in 0..ctx.trials {
        let mut rng = ctx.rng(1, i);
        let d = rng.random_range(2..=ctx.dims[0]);
        let rho = random_density(d, d, &mut rng);
        let sigma = random_density(d, d, &mut rng);
        let Ok(d1) = qre(&rho, &sigma).map(|v| v.to_f64()) else { continue };
        for a in [1.0 - 1e-4, 1.0 + 1e-4] {
            let e = srd(&rho, &sigma, order(a)).map_or(f64::INFINITY, |v| (v.to_f64() - d1).abs());
            worst_cont = worst_cont.max(e);
            if !(e <= cont_tol) {
                out.failures.push(failure(i, &[("alpha", a), ("qre", d1)], &[("continuity", e)]));
            }
        }
    }
    out.stat("max_oracle_error", worst);
    out.stat("max_continuity_error", worst_cont);
    out
}

pub static SUITES: &[SuiteSpec] = &[
    SuiteSpec {
        name: "dpi-holds",
        about: "DPI gap of random (rho, sigma, channel) triples at alpha >= 1/2; dims = [max dimension]",
        default_trials: 500,
        default_dims: &[6],
        tolerances: &[("gap_tol", 1e-9)],
        run: dpi_holds,
    },
    SuiteSpec {
        name: "equality",
        about: "equality certificate on constructed-equality and generic instances",
        default_trials: 200,
        default_dims: &[5],
        tolerances: &[("eq_tol", EQ_TOL), ("cross_tol", CROSS_TOL), ("generic_residual", 1e-4), ("generic_gap", 1e-3)],
        run: equality,
    },
    SuiteSpec {
        name: "stinespring",
        about: "Kraus and dilation routes to the adjoint channel agree",
        default_trials: 100,
        default_dims: &[4],
        tolerances: &[("route_tol", 1e-9)],
        run: stinespring,
    },
    SuiteSpec {
        name: "variational",
        about: "the variational objective peaks at H_hat and no random H beats it",
        default_trials: 200,
        default_dims: &[3],
        tolerances: &[("tol", 1e-9)],
        run: variational,
    },
    SuiteSpec {
        name: "sufficiency",
        about: "Petz sufficiency agrees with the alpha = 2 equality verdict",
        default_trials: 200,
        default_dims: &[4],
        tolerances: &[("gap_tol", 1e-8)],
        run: sufficiency,
    },
    SuiteSpec {
        name: "fidelity-measurement",
        about: "a fidelity-attaining qubit measurement keeps the alpha = 1/2 gap at zero without sufficiency",
        default_trials: 1,
        default_dims: &[2],
        tolerances: &[("gap_tol", 1e-6)],
        run: fidelity_measurement,
    },
    SuiteSpec {
        name: "duality",
        about: "S_alpha(A|B) + S_beta(A|C) = 0 on purifications; dims = [dim A, dim B]",
        default_trials: 50,
        default_dims: &[2, 2],
        tolerances: &[("gap_tol", 2e-6)],
        run: duality,
    },
    SuiteSpec {
        name: "araki-lieb",
        about: "Renyi Araki-Lieb sandwich and saturation on constructed states; dims = [dim A, dim B]",
        default_trials: 300,
        default_dims: &[2, 2],
        tolerances: &[("slack", 2e-6), ("saturation_tol", 1e-5)],
        run: araki_lieb,
    },
    SuiteSpec {
        name: "reof",
        about: "Renyi entanglement of formation on saturating, maximally entangled and product states",
        default_trials: 8,
        default_dims: &[2, 2],
        tolerances: &[("saturating_tol", 1e-4), ("bell_tol", 1e-6), ("product_tol", 1e-8)],
        run: reof,
    },
    SuiteSpec {
        name: "entanglement-fidelity",
        about: "entanglement fidelity meets F^2 exactly for pure inputs and strictly below for mixed ones",
        default_trials: 100,
        default_dims: &[4],
        tolerances: &[("pure_tol", 1e-10), ("mixed_gap", 1e-4)],
        run: entanglement_fidelity,
    },
    SuiteSpec {
        name: "dpi-violation-below-half",
        about: "random two-qubit search for DPI violations below alpha = 1/2, with an alpha = 1/2 control",
        default_trials: 20_000,
        default_dims: &[2, 2],
        tolerances: &[("violation_tol", 1e-4), ("control_tol", 1e-9)],
        run: violation_below_half,
    },
    SuiteSpec {
        name: "classical",
        about: "commuting inputs match scalar oracles; alpha -> 1 continuity",
        default_trials: 100,
        default_dims: &[5],
        tolerances: &[("oracle_tol", 1e-10), ("continuity_tol", 1e-3)],
        run: classical,
    },
];
