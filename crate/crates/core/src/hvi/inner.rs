//! Convex subproblem of the outer iteration:
//!
//! ```text
//! min  G(u) + ½⟨S g, g⟩ + c·x + Σ κ_i |v_i|   subject to  lo ≤ u ≤ hi
//! ```
//!
//! Huber continuation with projected damped Newton brings the iterate close,
//! then an active-set Newton method on the exact problem finishes it and the
//! proximal natural residual certifies optimality.

use nalgebra::{DMatrix, DVector};

use super::system::CoupledSystem;
use super::BoxConstraint;
use crate::superpotential::{huber, huber_derivative, huber_second_derivative};

const ARMIJO: f64 = 1e-4;
const MAX_NEWTON: usize = 60;
const MAX_ACTIVE_SET: usize = 60;

/// Result of one convex subproblem solve.
#[derive(Debug, Clone)]
pub struct InnerResult {
    pub x: DVector<f64>,
    pub newton_steps: usize,
    /// `(ε, smoothed energy)` after every accepted continuation step.
    pub energy_log: Vec<(f64, f64)>,
    pub residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kink {
    None,
    Stick,
    Slip(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Bound {
    Free,
    Lower,
    Upper,
}

pub(crate) struct Subproblem<'a> {
    pub sys: &'a CoupledSystem,
    pub c: DVector<f64>,
    pub kink: DVector<f64>,
    pub bounds: Option<&'a BoxConstraint>,
    pub tol: f64,
}

impl Subproblem<'_> {
    fn nu(&self) -> usize {
        self.sys.n_u()
    }

    fn smooth_value(&self, x: &DVector<f64>) -> f64 {
        self.sys.smooth_energy(x) + self.c.dot(x)
    }

    fn smooth_grad(&self, x: &DVector<f64>) -> DVector<f64> {
        self.sys.operator(x) + &self.c
    }

    fn smoothed_value(&self, x: &DVector<f64>, eps: f64) -> f64 {
        let nu = self.nu();
        let k: f64 = (0..self.kink.len()).map(|i| self.kink[i] * huber(eps, x[nu + i])).sum();
        self.smooth_value(x) + k
    }

    fn project(&self, x: &mut DVector<f64>) {
        if let Some(b) = self.bounds {
            for i in 0..self.nu() {
                x[i] = x[i].max(b.lower[i]).min(b.upper[i]);
            }
        }
    }

    fn has_kinks(&self) -> bool {
        self.kink.iter().any(|&k| k > 0.0)
    }

    /// `‖x - prox(x - ∇f(x))‖_∞` for the kink and box terms.
    pub fn natural_residual(&self, x: &DVector<f64>) -> f64 {
        let g = self.smooth_grad(x);
        let nu = self.nu();
        let mut r: f64 = 0.0;
        for i in 0..x.len() {
            let z = x[i] - g[i];
            let p = if i < nu {
                match self.bounds {
                    Some(b) => z.max(b.lower[i]).min(b.upper[i]),
                    None => z,
                }
            } else {
                let k = self.kink[i - nu];
                z.signum() * (z.abs() - k).max(0.0)
            };
            r = r.max((x[i] - p).abs());
        }
        r
    }

    fn grad_scale(&self) -> f64 {
        self.c.amax().max(self.kink.amax()).max(f64::MIN_POSITIVE)
    }

    /// Solves `H_FF d_F = -g_F` and scatters `d` (zero outside `free`).
    fn reduced_step(h: &DMatrix<f64>, g: &DVector<f64>, free: &[usize]) -> Option<DVector<f64>> {
        let m = free.len();
        let mut d = DVector::zeros(g.len());
        if m == 0 {
            return Some(d);
        }
        let hf = DMatrix::from_fn(m, m, |i, j| h[(free[i], free[j])]);
        let gf = DVector::from_fn(m, |i, _| -g[free[i]]);
        let sol = match hf.clone().cholesky() {
            Some(c) => c.solve(&gf),
            None => {
                let shift = 1e-12 * hf.diagonal().amax().max(1.0);
                let reg = hf + DMatrix::identity(m, m) * shift;
                reg.cholesky()?.solve(&gf)
            }
        };
        for (i, &fi) in free.iter().enumerate() {
            d[fi] = sol[i];
        }
        Some(d)
    }

    /// Projected damped Newton on the Huber-smoothed objective.
    fn smoothed_newton(&self, x: &mut DVector<f64>, eps: f64, steps: &mut usize, log: &mut Vec<(f64, f64)>) -> bool {
        let nu = self.nu();
        let gtol = self.tol * self.grad_scale();
        let mut f = self.smoothed_value(x, eps);
        for _ in 0..MAX_NEWTON {
            let mut g = self.smooth_grad(x);
            for i in 0..self.kink.len() {
                g[nu + i] += self.kink[i] * huber_derivative(eps, x[nu + i]);
            }
            let mut pg: f64 = 0.0;
            let mut free = Vec::with_capacity(x.len());
            for i in 0..x.len() {
                let mut active = false;
                if i < nu {
                    if let Some(b) = self.bounds {
                        active = (x[i] <= b.lower[i] && g[i] > 0.0) || (x[i] >= b.upper[i] && g[i] < 0.0);
                        pg = pg.max((x[i] - (x[i] - g[i]).max(b.lower[i]).min(b.upper[i])).abs());
                    } else {
                        pg = pg.max(g[i].abs());
                    }
                } else {
                    pg = pg.max(g[i].abs());
                }
                if !active {
                    free.push(i);
                }
            }
            if pg <= gtol {
                return true;
            }
            let mut h = self.sys.hessian(x);
            for i in 0..self.kink.len() {
                h[(nu + i, nu + i)] += self.kink[i] * huber_second_derivative(eps, x[nu + i]);
            }
            let Some(d) = Self::reduced_step(&h, &g, &free) else {
                return false;
            };
            let mut alpha = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                let mut trial = &*x + &d * alpha;
                self.project(&mut trial);
                let ft = self.smoothed_value(&trial, eps);
                let decrease = g.dot(&(&trial - &*x));
                if ft <= f + ARMIJO * decrease {
                    let stalled = (&trial - &*x).amax() <= 1e-16 * x.amax().max(1.0);
                    *x = trial;
                    f = ft;
                    accepted = true;
                    *steps += 1;
                    log.push((eps, f));
                    if stalled {
                        return true;
                    }
                    break;
                }
                alpha *= 0.5;
            }
            if !accepted {
                // No descent left at working precision.
                return pg <= 1e3 * gtol;
            }
        }
        false
    }

    /// Active-set Newton on the exact nonsmooth problem.
    fn active_set(&self, x: &mut DVector<f64>, steps: &mut usize) -> bool {
        let nu = self.nu();
        let n = x.len();
        let gtol = self.tol * self.grad_scale();
        let ztol = 1e-9 * x.amax().max(f64::MIN_POSITIVE);
        let mut kinks: Vec<Kink> = (0..self.kink.len())
            .map(|i| {
                if self.kink[i] <= 0.0 {
                    Kink::None
                } else if x[nu + i].abs() <= ztol {
                    Kink::Stick
                } else {
                    Kink::Slip(x[nu + i].signum())
                }
            })
            .collect();
        let mut bounds: Vec<Bound> = (0..nu)
            .map(|i| match self.bounds {
                Some(b) if x[i] <= b.lower[i] + 1e-12 * (1.0 + b.lower[i].abs()) => Bound::Lower,
                Some(b) if x[i] >= b.upper[i] - 1e-12 * (1.0 + b.upper[i].abs()) => Bound::Upper,
                _ => Bound::Free,
            })
            .collect();

        for _ in 0..MAX_ACTIVE_SET {
            let mut free = Vec::with_capacity(n);
            for i in 0..nu {
                match bounds[i] {
                    Bound::Free => free.push(i),
                    Bound::Lower => x[i] = self.bounds.unwrap().lower[i],
                    Bound::Upper => x[i] = self.bounds.unwrap().upper[i],
                }
            }
            for (i, k) in kinks.iter().enumerate() {
                match k {
                    Kink::Stick => x[nu + i] = 0.0,
                    _ => free.push(nu + i),
                }
            }
            let slip_term = |x: &DVector<f64>| -> f64 {
                kinks
                    .iter()
                    .enumerate()
                    .map(|(i, k)| match k {
                        Kink::Slip(s) => self.kink[i] * s * x[nu + i],
                        _ => 0.0,
                    })
                    .sum()
            };
            let mut f = self.smooth_value(x) + slip_term(x);
            for _ in 0..MAX_NEWTON {
                let mut g = self.smooth_grad(x);
                for (i, k) in kinks.iter().enumerate() {
                    if let Kink::Slip(s) = k {
                        g[nu + i] += self.kink[i] * s;
                    }
                }
                let gf = free.iter().map(|&i| g[i].abs()).fold(0.0, f64::max);
                if gf <= gtol {
                    break;
                }
                let h = self.sys.hessian(x);
                let Some(d) = Self::reduced_step(&h, &g, &free) else {
                    return false;
                };
                let mut alpha = 1.0;
                let mut moved = false;
                for _ in 0..60 {
                    let trial = &*x + &d * alpha;
                    let ft = self.smooth_value(&trial) + slip_term(&trial);
                    if ft <= f + ARMIJO * alpha * g.dot(&d) {
                        *x = trial;
                        f = ft;
                        moved = true;
                        *steps += 1;
                        break;
                    }
                    alpha *= 0.5;
                }
                if !moved {
                    break;
                }
            }

            let g = self.smooth_grad(x);
            let mut changed = false;
            for (i, k) in kinks.iter_mut().enumerate() {
                let (vi, gi, ki) = (x[nu + i], g[nu + i], self.kink[i]);
                match *k {
                    Kink::Slip(s) if s * vi <= 0.0 => {
                        *k = Kink::Stick;
                        changed = true;
                    }
                    Kink::Stick if gi.abs() > ki + gtol => {
                        *k = Kink::Slip(-gi.signum());
                        changed = true;
                    }
                    _ => {}
                }
            }
            if let Some(b) = self.bounds {
                for i in 0..nu {
                    let next = match bounds[i] {
                        Bound::Free if x[i] < b.lower[i] => Bound::Lower,
                        Bound::Free if x[i] > b.upper[i] => Bound::Upper,
                        Bound::Lower if g[i] < -gtol && b.lower[i] < b.upper[i] => Bound::Free,
                        Bound::Upper if g[i] > gtol && b.lower[i] < b.upper[i] => Bound::Free,
                        s => s,
                    };
                    if next != bounds[i] {
                        bounds[i] = next;
                        changed = true;
                    }
                }
            }
            if !changed {
                return true;
            }
        }
        false
    }

    pub fn solve(&self, start: &DVector<f64>, warm: bool) -> InnerResult {
        let mut x = start.clone();
        self.project(&mut x);
        let mut steps = 0;
        let mut log = Vec::new();

        if !self.has_kinks() && self.bounds.is_none() {
            let ok = self.smoothed_newton(&mut x, 1.0, &mut steps, &mut log);
            let residual = self.natural_residual(&x);
            return InnerResult {
                x,
                newton_steps: steps,
                energy_log: log,
                residual,
                converged: ok,
            };
        }

        if warm {
            let mut y = x.clone();
            let mut s = 0;
            if self.active_set(&mut y, &mut s) {
                let residual = self.natural_residual(&y);
                return InnerResult {
                    x: y,
                    newton_steps: s,
                    energy_log: log,
                    residual,
                    converged: true,
                };
            }
        }

        let scale = x.amax().max(1.0);
        let mut eps = 1e-2 * scale;
        let mut ok = true;
        while eps >= 1e-8 * scale * 0.999 {
            ok &= self.smoothed_newton(&mut x, eps, &mut steps, &mut log);
            eps *= 0.1;
        }
        let mut y = x.clone();
        let polished = self.active_set(&mut y, &mut steps);
        if polished {
            x = y;
        }
        let residual = self.natural_residual(&x);
        InnerResult {
            x,
            newton_steps: steps,
            energy_log: log,
            residual,
            converged: polished || ok,
        }
    }
}
