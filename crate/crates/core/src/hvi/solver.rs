//! Outer iteration.
//!
//! The friction density splits as `j = μ₁|·| + h` with `h` concave and
//! `h'` Lipschitz with constant `c_J`. Each outer step keeps the convex kink
//! exact and linearizes `h` at the current jump `v_k`:
//!
//! ```text
//! x_{k+1} = argmin  G(u) + ½⟨Sg, g⟩ + Σ w_i μ₁|v_i| + Σ w_i h'(v_{k,i}) v_i + F(x) - λ(x)
//! ```
//!
//! The fixed points are exactly the solutions of the discrete inequality, the
//! energy decreases monotonically, and the map contracts with factor
//! `c_J ‖γ‖² / c_A` in the `E`-norm whenever the smallness margin is positive.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::inner::{InnerResult, Subproblem};
use super::HviProblem;
use crate::error::{check_len, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Relative outer tolerance on `‖x_{k+1} - x_k‖_E / ‖x_{k+1}‖_E`.
    pub outer_tol: f64,
    /// Relative tolerance of the inner first-order conditions.
    pub inner_tol: f64,
    pub max_outer: usize,
    /// Random test directions for the a-posteriori residual.
    pub residual_directions: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            outer_tol: 1e-9,
            inner_tol: 1e-11,
            max_outer: 200,
            residual_directions: 200,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HviSolution {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub outer_iterations: usize,
    /// `‖x_{k+1} - x_k‖_E` per outer step.
    pub step_norms: Vec<f64>,
    /// Ratios of consecutive step norms.
    pub contraction_factors: Vec<f64>,
    pub inner_newton_steps: usize,
    /// Worst inner natural residual met along the way.
    pub inner_residual: f64,
    /// Energy after every outer step.
    pub energies: Vec<f64>,
    /// `max(0, -min φ(x, y) - F(y) + F(x))` over the sampled test points.
    pub residual: f64,
    pub smallness_satisfied: bool,
    pub converged: bool,
}

impl HviSolution {
    pub fn x(&self) -> DVector<f64> {
        DVector::from_iterator(self.u.len() + self.v.len(), self.u.iter().chain(&self.v).copied())
    }

    /// Largest contraction factor observed while the step norm was still
    /// above `floor · ‖x‖_E`.
    pub fn observed_contraction(&self, floor: f64, x_norm: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, &t) in self.contraction_factors.iter().enumerate() {
            if self.step_norms[k + 1] > floor * x_norm {
                worst = worst.max(t);
            }
        }
        worst
    }
}

fn subproblem<'a>(problem: &'a HviProblem, frozen: &DVector<f64>, tol: f64) -> Subproblem<'a> {
    let sys = &*problem.system;
    let mut c = problem.linear_term();
    let kink = match &sys.friction {
        Some(j) => {
            let (_, v) = sys.split(frozen);
            let mut tail = c.rows_mut(sys.n_u(), sys.n_v());
            tail += &j.concave_gradient(&v);
            j.kink_weights()
        }
        None => DVector::zeros(sys.n_v()),
    };
    Subproblem {
        sys,
        c,
        kink,
        bounds: problem.extended.bounds.as_ref(),
        tol,
    }
}

/// One outer step: the convex problem with the concave part of the friction
/// law linearized at `frozen`, solved from `start` by Huber continuation and
/// an active-set finish.
pub fn inner_convex_solve(
    problem: &HviProblem,
    frozen: &DVector<f64>,
    start: &DVector<f64>,
    inner_tol: f64,
) -> Result<InnerResult> {
    check_len("frozen point", problem.n(), frozen.len())?;
    check_len("start vector", problem.n(), start.len())?;
    Ok(subproblem(problem, frozen, inner_tol).solve(start, false))
}

/// Solves from the zero start (projected into the box).
pub fn solve(problem: &HviProblem, opts: &SolverOptions) -> Result<HviSolution> {
    solve_from(problem, &DVector::zeros(problem.n()), opts)
}

pub fn solve_from(problem: &HviProblem, start: &DVector<f64>, opts: &SolverOptions) -> Result<HviSolution> {
    let sys = &problem.system;
    check_len("start vector", sys.n(), start.len())?;
    let smallness = *sys.smallness()?;
    if !smallness.satisfied() {
        log::warn!(
            "smallness margin {:.3e} <= 0: solutions exist but uniqueness and contraction are not certified",
            smallness.margin
        );
    }
    let nu = sys.n_u();
    let mut x = start.clone();
    if let Some(b) = &problem.extended.bounds {
        let mut u = x.rows(0, nu).into_owned();
        b.project(&mut u);
        x.rows_mut(0, nu).copy_from(&u);
    }

    let mut steps = vec![];
    let mut factors = vec![];
    let mut energies = vec![];
    let mut newton = 0;
    let mut inner_residual: f64 = 0.0;
    let mut converged = false;
    let mut iterations = 0;
    for k in 0..opts.max_outer {
        let sub = subproblem(problem, &x, opts.inner_tol);
        let out = sub.solve(&x, k > 0);
        if !out.converged {
            return Err(Error::Solver(format!(
                "inner solve failed at outer step {k} (natural residual {:.3e})",
                out.residual
            )));
        }
        newton += out.newton_steps;
        inner_residual = inner_residual.max(out.residual);
        let d = sys.e_norm(&(&out.x - &x));
        if let Some(&prev) = steps.last() {
            if prev > 0.0 {
                factors.push(d / prev);
            }
        }
        steps.push(d);
        x = out.x;
        energies.push(problem.energy(&x));
        iterations = k + 1;
        if d <= opts.outer_tol * sys.e_norm(&x) || d == 0.0 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Solver(format!(
            "outer iteration did not reach tolerance in {} steps (last step {:.3e})",
            opts.max_outer,
            steps.last().copied().unwrap_or(f64::NAN)
        )));
    }
    let violation = problem.hvi_violation(&x, opts.residual_directions, opts.seed);
    let (u, v) = sys.split(&x);
    Ok(HviSolution {
        u: u.iter().copied().collect(),
        v: v.iter().copied().collect(),
        outer_iterations: iterations,
        step_norms: steps,
        contraction_factors: factors,
        inner_newton_steps: newton,
        inner_residual,
        energies,
        residual: (-violation).max(0.0),
        smallness_satisfied: smallness.satisfied(),
        converged,
    })
}
