//! The discrete hemivariational inequality
//!
//! ```text
//! find x ∈ dom F:  A(x)(y - x) + J⁰(γx; γ(y - x)) + F(y) - F(x) ≥ λ(y - x)  ∀y
//! ```
//!
//! with `A` the gradient of `G(u) + ½⟨S g, g⟩`, its energy, the bifunction
//! `φ`, the smallness certificate and the solvers built on top.

mod inner;
mod oracle;
mod solver;
mod system;

use std::sync::Arc;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use oracle::brute_force_oracle;
pub use inner::InnerResult;
pub use solver::{inner_convex_solve, solve, solve_from, HviSolution, SolverOptions};
pub use system::CoupledSystem;

use crate::error::{check_len, Error, Result};

/// Bilateral bounds on the interior unknowns; infinite entries are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxConstraint {
    pub lower: DVector<f64>,
    pub upper: DVector<f64>,
}

impl BoxConstraint {
    pub fn new(lower: DVector<f64>, upper: DVector<f64>) -> Result<Self> {
        check_len("upper obstacle", lower.len(), upper.len())?;
        for i in 0..lower.len() {
            if lower[i].is_nan() || upper[i].is_nan() || lower[i] > upper[i] {
                return Err(Error::Infeasible(format!(
                    "lower obstacle exceeds upper at node {i} ({} > {})",
                    lower[i], upper[i]
                )));
            }
            if lower[i] == f64::INFINITY || upper[i] == f64::NEG_INFINITY {
                return Err(Error::Infeasible(format!("empty bounds at node {i}")));
            }
        }
        Ok(BoxConstraint { lower, upper })
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn project(&self, u: &mut DVector<f64>) {
        for i in 0..u.len() {
            u[i] = u[i].max(self.lower[i]).min(self.upper[i]);
        }
    }

    pub fn contains(&self, u: &DVector<f64>) -> bool {
        (0..u.len()).all(|i| u[i] >= self.lower[i] && u[i] <= self.upper[i])
    }
}

/// `F(x) = ℓ·x + χ_C(u)`: a linear functional plus the indicator of a box.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExtendedF {
    pub linear: Option<DVector<f64>>,
    pub bounds: Option<BoxConstraint>,
}

impl ExtendedF {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn with_bounds(bounds: BoxConstraint) -> Self {
        ExtendedF {
            linear: None,
            bounds: Some(bounds),
        }
    }

    /// `F(x)`, `+∞` outside the box.
    pub fn value(&self, nu: usize, x: &DVector<f64>) -> f64 {
        if let Some(b) = &self.bounds {
            if !b.contains(&x.rows(0, nu).into_owned()) {
                return f64::INFINITY;
            }
        }
        self.linear.as_ref().map_or(0.0, |l| l.dot(x))
    }

    /// Whether the effective domain is nonempty.
    pub fn is_proper(&self) -> bool {
        self.bounds.as_ref().is_none_or(|b| {
            (0..b.len()).all(|i| b.lower[i] <= b.upper[i] && b.lower[i] < f64::INFINITY && b.upper[i] > f64::NEG_INFINITY)
        })
    }
}

/// Constants behind the uniqueness and contraction certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallnessReport {
    /// Coercivity of the coupled operator in the discrete `E`-norm.
    pub c_a: f64,
    /// Squared norm of `γ: E → L²(Γ_s)` (lumped).
    pub gamma_norm_sq: f64,
    pub c_j: f64,
    pub d_j: f64,
    pub margin: f64,
}

impl SmallnessReport {
    pub fn satisfied(&self) -> bool {
        self.margin > 0.0
    }

    /// Contraction factor bound `c_J ‖γ‖² / c_A` of the outer iteration.
    pub fn contraction_bound(&self) -> f64 {
        self.c_j * self.gamma_norm_sq / self.c_a
    }
}

/// A data instance on a shared [`CoupledSystem`].
#[derive(Debug, Clone)]
pub struct HviProblem {
    pub system: Arc<CoupledSystem>,
    pub lambda: DVector<f64>,
    pub extended: ExtendedF,
}

impl HviProblem {
    pub fn new(system: Arc<CoupledSystem>, lambda: DVector<f64>, extended: ExtendedF) -> Result<Self> {
        let n = system.n();
        check_len("load vector", n, lambda.len())?;
        if let Some(l) = &extended.linear {
            check_len("linear part of F", n, l.len())?;
        }
        if let Some(b) = &extended.bounds {
            check_len("box constraint", system.n_u(), b.len())?;
        }
        if !extended.is_proper() {
            return Err(Error::Infeasible("F has an empty effective domain".into()));
        }
        Ok(HviProblem {
            system,
            lambda,
            extended,
        })
    }

    pub fn with_lambda(&self, lambda: DVector<f64>) -> Result<Self> {
        Self::new(self.system.clone(), lambda, self.extended.clone())
    }

    pub fn with_extended(&self, extended: ExtendedF) -> Result<Self> {
        Self::new(self.system.clone(), self.lambda.clone(), extended)
    }

    pub fn n(&self) -> usize {
        self.system.n()
    }

    /// Linear coefficient `ℓ - λ` of the energy.
    pub fn linear_term(&self) -> DVector<f64> {
        match &self.extended.linear {
            Some(l) => l - &self.lambda,
            None => -&self.lambda,
        }
    }

    /// Clarke-regular part `J_h(v)`; zero without friction.
    pub fn friction_value(&self, x: &DVector<f64>) -> f64 {
        let (_, v) = self.system.split(x);
        self.system.friction.as_ref().map_or(0.0, |j| j.value_unchecked(&v))
    }

    /// `𝓔(x) = G(u) + ½⟨Sg, g⟩ + J_h(v) + F(x) - λ(x)`.
    pub fn energy(&self, x: &DVector<f64>) -> f64 {
        let f = self.extended.value(self.system.n_u(), x);
        if f.is_infinite() {
            return f;
        }
        self.system.smooth_energy(x) + self.friction_value(x) + f - self.lambda.dot(x)
    }

    /// `J⁰_h(γx; γz)`.
    pub fn j0(&self, x: &DVector<f64>, z: &DVector<f64>) -> f64 {
        match &self.system.friction {
            None => 0.0,
            Some(j) => {
                let (_, y) = self.system.split(x);
                let (_, dz) = self.system.split(z);
                j.j0(&y, &dz).expect("sized")
            }
        }
    }

    /// `φ(x, y) = A(x)(y - x) + J⁰(γx; γ(y - x)) - λ(y - x)`.
    pub fn bifunction_phi(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let d = y - x;
        self.system.apply_a(x, &d) + self.j0(x, &d) - self.lambda.dot(&d)
    }

    /// Most negative value of `φ(x, y) + F(y) - F(x)` over `n_dirs` random
    /// feasible `y` at `E`-distance comparable to `max(‖x‖_E, 1)`.
    pub fn hvi_violation(&self, x: &DVector<f64>, n_dirs: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.n();
        let nu = self.system.n_u();
        let radius = self.system.e_norm(x).max(1.0);
        let fx = self.extended.value(nu, x);
        let mut worst = f64::INFINITY;
        for _ in 0..n_dirs {
            let mut d = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
            let norm = self.system.e_norm(&d);
            d *= radius / norm;
            let mut y = x + d;
            if let Some(b) = &self.extended.bounds {
                let mut u = y.rows(0, nu).into_owned();
                b.project(&mut u);
                y.rows_mut(0, nu).copy_from(&u);
            }
            let val = self.bifunction_phi(x, &y) + self.extended.value(nu, &y) - fx;
            worst = worst.min(val);
        }
        worst
    }
}
