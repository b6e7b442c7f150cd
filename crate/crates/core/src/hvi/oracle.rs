//! Direct minimization of the energy for problems with at most six unknowns.

use nalgebra::DVector;

use super::HviProblem;
use crate::error::{Error, Result};

const MAX_UNKNOWNS: usize = 6;
const GRID_BUDGET: f64 = 2.0e5;
const STARTS: usize = 6;
const MAX_SWEEPS: usize = 20_000;

fn golden(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        c
    } else {
        d
    }
}

/// Global minimizer of `𝓔(x) = G(u) + ½⟨Sg, g⟩ + J_h(v) + F(x) - λ(x)`.
///
/// The search region comes from the coercivity bound
/// `𝓔(x) ≥ c_A/2 ‖x‖²_E - ‖ℓ - λ‖_{E*} ‖x‖_E`. A tensor grid over that region
/// seeds several coordinate searches with exact golden-section line
/// minimization, each followed by a pattern move along the sweep displacement.
pub fn brute_force_oracle(problem: &HviProblem) -> Result<DVector<f64>> {
    let sys = &problem.system;
    let n = sys.n();
    if n > MAX_UNKNOWNS {
        return Err(Error::OracleTooLarge(n));
    }
    let nu = sys.n_u();
    let c_a = sys.smallness()?.c_a;
    let cstar = sys.dual_norm(&problem.linear_term());

    let mut z = DVector::zeros(n);
    if let Some(b) = &problem.extended.bounds {
        for i in 0..nu {
            z[i] = 0f64.max(b.lower[i]).min(b.upper[i]);
        }
    }
    let ez = problem.energy(&z).max(0.0);
    let radius = (cstar + (cstar * cstar + 2.0 * c_a * ez).sqrt()) / c_a * 1.05 + 1e-12;

    let mut lo = DVector::zeros(n);
    let mut hi = DVector::zeros(n);
    for i in 0..n {
        let mut e = DVector::zeros(n);
        e[i] = 1.0;
        let r = radius * sys.dual_norm(&e);
        lo[i] = -r;
        hi[i] = r;
        if i < nu {
            if let Some(b) = &problem.extended.bounds {
                lo[i] = lo[i].max(b.lower[i]);
                hi[i] = hi[i].min(b.upper[i]);
                if lo[i] > hi[i] {
                    lo[i] = b.lower[i];
                    hi[i] = b.lower[i];
                }
            }
        }
    }

    let per_dim = (GRID_BUDGET.powf(1.0 / n as f64).floor() as usize).clamp(3, 41);
    let mut best: Vec<(f64, DVector<f64>)> = Vec::new();
    let total = per_dim.pow(n as u32);
    let mut x = DVector::zeros(n);
    for idx in 0..total {
        let mut r = idx;
        for i in 0..n {
            let k = r % per_dim;
            r /= per_dim;
            x[i] = lo[i] + (hi[i] - lo[i]) * k as f64 / (per_dim - 1) as f64;
        }
        let e = problem.energy(&x);
        if best.len() < STARTS || e < best.last().unwrap().0 {
            best.push((e, x.clone()));
            best.sort_by(|a, b| a.0.total_cmp(&b.0));
            best.truncate(STARTS);
        }
    }

    let mut winner: Option<(f64, DVector<f64>)> = None;
    for (_, start) in best {
        let mut x = start;
        for _ in 0..MAX_SWEEPS {
            let before = x.clone();
            for i in 0..n {
                let mut y = x.clone();
                let t = golden(
                    |t| {
                        y[i] = t;
                        problem.energy(&y)
                    },
                    lo[i],
                    hi[i],
                );
                x[i] = t;
            }
            let d = &x - &before;
            if d.amax() > 0.0 {
                // Largest step along d that stays in the search box.
                let mut tmax = f64::INFINITY;
                for i in 0..n {
                    if d[i] > 0.0 {
                        tmax = tmax.min((hi[i] - x[i]) / d[i]);
                    } else if d[i] < 0.0 {
                        tmax = tmax.min((lo[i] - x[i]) / d[i]);
                    }
                }
                let base = x.clone();
                let t = golden(|t| problem.energy(&(&base + &d * t)), 0.0, tmax.max(0.0));
                let moved = &base + &d * t;
                if problem.energy(&moved) < problem.energy(&base) {
                    x = moved;
                }
            }
            let change = sys.e_norm(&(&x - &before));
            if change <= 1e-14 * radius {
                break;
            }
        }
        let e = problem.energy(&x);
        if winner.as_ref().is_none_or(|(we, _)| e < *we) {
            winner = Some((e, x));
        }
    }
    Ok(winner.expect("at least one start").1)
}
