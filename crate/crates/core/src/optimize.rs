//! Thin wrapper around argmin's BFGS with central finite-difference
//! gradients, used by every continuous minimization in the crate.

use std::cell::RefCell;

use argmin::core::{CostFunction, Executor, Gradient, State};
use argmin::solver::linesearch::MoreThuenteLineSearch;
use argmin::solver::quasinewton::BFGS;

#[derive(Debug, Clone, Copy)]
pub struct MinimizeOptions {
    pub max_iters: u64,
    pub tol_grad: f64,
    pub tol_cost: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            max_iters: 500,
            tol_grad: 1e-10,
            tol_cost: 1e-15,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    /// The solver stopped on a tolerance rather than the iteration cap or a
    /// failed line search.
    pub converged: bool,
}

struct Tracked<'a, F> {
    f: &'a F,
    best: &'a RefCell<(Vec<f64>, f64)>,
}

impl<F: Fn(&[f64]) -> f64> Tracked<'_, F> {
    fn eval(&self, x: &[f64]) -> f64 {
        let v = (self.f)(x);
        let mut best = self.best.borrow_mut();
        if v < best.1 {
            *best = (x.to_vec(), v);
        }
        v
    }
}

impl<F: Fn(&[f64]) -> f64> CostFunction for Tracked<'_, F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Vec<f64>) -> Result<f64, argmin::core::Error> {
        Ok(self.eval(x))
    }
}

impl<F: Fn(&[f64]) -> f64> Gradient for Tracked<'_, F> {
    type Param = Vec<f64>;
    type Gradient = Vec<f64>;

    fn gradient(&self, x: &Vec<f64>) -> Result<Vec<f64>, argmin::core::Error> {
        finitediff::vec::diff::central_diff_vec(x, &|p: &Vec<f64>| Ok(self.eval(p)))
    }
}

/// Minimizes `f` from `x0`. Non-finite values are treated as `+inf` by the
/// line search; the best point ever evaluated is returned even when the
/// solver aborts.
pub fn minimize<F: Fn(&[f64]) -> f64>(f: F, x0: Vec<f64>, opts: MinimizeOptions) -> Minimum {
    let n = x0.len();
    let f0 = f(&x0);
    if n == 0 {
        return Minimum {
            x: x0,
            value: f0,
            converged: true,
        };
    }
    let best = RefCell::new((x0.clone(), f0));
    let problem = Tracked { f: &f, best: &best };
    let inv_hessian: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let solver = BFGS::new(MoreThuenteLineSearch::new())
        .with_tolerance_grad(opts.tol_grad)
        .and_then(|s| s.with_tolerance_cost(opts.tol_cost))
        .expect("tolerances are non-negative");
    let run = Executor::new(problem, solver)
        .configure(|s| s.param(x0).inv_hessian(inv_hessian).max_iters(opts.max_iters))
        .run();
    let converged = match &run {
        Ok(res) => {
            let state = res.state();
            state.get_iter() < opts.max_iters && state.terminated()
        }
        Err(_) => false,
    };
    let (x, value) = best.into_inner();
    Minimum { x, value, converged }
}
