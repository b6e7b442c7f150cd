//! Stability of the solution map under Mosco-convergent perturbations of `F`.
//!
//! In finite dimensions weak and strong convergence coincide, so a sequence of
//! linear forms or obstacles that converges coefficientwise is Mosco
//! convergent with constant recovery sequences (or the clamp of
//! [`mosco_recovery_cut`] for obstacles).

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::ScalarField;
use crate::error::{check_len, Error, Result};
use crate::hvi::{solve, BoxConstraint, CoupledSystem, ExtendedF, HviProblem, SolverOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Decay {
    Zero,
    /// `1/n`
    Harmonic,
    /// `ratioⁿ`
    Geometric { ratio: f64 },
}

impl Decay {
    pub fn at(&self, n: usize) -> f64 {
        match *self {
            Decay::Zero => 0.0,
            Decay::Harmonic => 1.0 / n as f64,
            Decay::Geometric { ratio } => ratio.powi(n as i32),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Decay::Geometric { ratio } if !(0.0..1.0).contains(&ratio) => {
                Err(Error::InvalidParameter(format!("geometric decay ratio must lie in [0, 1), got {ratio}")))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SequenceKind {
    /// `λ_n = λ + decay(n) δλ` on top of the base problem's `F`.
    LinearForm { delta_lambda: DVector<f64> },
    /// Boxes `[lower - decay(n) δ_lower, upper + decay(n) δ_upper]` replacing the
    /// base problem's `F`.
    Obstacle {
        lower: DVector<f64>,
        upper: DVector<f64>,
        delta_lower: DVector<f64>,
        delta_upper: DVector<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MoscoSequence {
    pub kind: SequenceKind,
    pub decay: Decay,
}

/// Linear-form sequence with perturbation loads `(f̃, q̃)`.
pub fn make_linear_sequence(
    system: &CoupledSystem,
    f_perturbation: &ScalarField,
    q_perturbation: &ScalarField,
    decay: Decay,
) -> Result<MoscoSequence> {
    decay.validate()?;
    Ok(MoscoSequence {
        kind: SequenceKind::LinearForm {
            delta_lambda: system.lambda(f_perturbation, q_perturbation)?,
        },
        decay,
    })
}

pub fn make_obstacle_sequence(
    lower: DVector<f64>,
    upper: DVector<f64>,
    delta_lower: DVector<f64>,
    delta_upper: DVector<f64>,
    decay: Decay,
) -> Result<MoscoSequence> {
    decay.validate()?;
    let n = lower.len();
    check_len("upper obstacle", n, upper.len())?;
    check_len("lower obstacle perturbation", n, delta_lower.len())?;
    check_len("upper obstacle perturbation", n, delta_upper.len())?;
    if (0..n).any(|i| !(lower[i] <= upper[i])) {
        return Err(Error::InvalidParameter("limit obstacles must satisfy lower <= upper".into()));
    }
    if delta_lower.iter().chain(delta_upper.iter()).any(|d| !d.is_finite()) {
        return Err(Error::InvalidParameter("obstacle perturbations must be finite".into()));
    }
    Ok(MoscoSequence {
        kind: SequenceKind::Obstacle {
            lower,
            upper,
            delta_lower,
            delta_upper,
        },
        decay,
    })
}

/// Random smooth perturbation fields: a few Gaussian bumps each, amplitudes
/// uniform in `[-amplitude, amplitude]`, centres in the box `[-extent, extent]²`.
pub fn random_perturbation(seed: u64, amplitude: f64, extent: f64) -> (ScalarField, ScalarField) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut field = || {
        let mut f = ScalarField::constant(amplitude * rng.random_range(-1.0..1.0));
        for _ in 0..3 {
            let a = amplitude * rng.random_range(-1.0..1.0);
            let c = [rng.random_range(-extent..extent), rng.random_range(-extent..extent)];
            f = f.with_bump(a, c, 0.25 * extent);
        }
        f
    };
    let f = field();
    let q = field();
    (f, q)
}

impl MoscoSequence {
    /// Member `n ≥ 1`, or the limit for `None`.
    pub fn member(&self, base: &HviProblem, n: Option<usize>) -> Result<HviProblem> {
        let d = n.map_or(0.0, |n| self.decay.at(n));
        match &self.kind {
            SequenceKind::LinearForm { delta_lambda } => {
                check_len("load perturbation", base.n(), delta_lambda.len())?;
                base.with_lambda(&base.lambda + d * delta_lambda)
            }
            SequenceKind::Obstacle { .. } => {
                let (lo, hi) = self.obstacles(n);
                if (0..lo.len()).any(|i| !(lo[i] <= hi[i])) {
                    return Err(Error::Infeasible(format!(
                        "obstacle member {} violates lower <= upper",
                        n.map_or("limit".to_string(), |n| n.to_string())
                    )));
                }
                base.with_extended(ExtendedF::with_bounds(BoxConstraint::new(lo, hi)?))
            }
        }
    }

    /// Obstacle pair of member `n` (the limit for `None`); unbounded for
    /// linear-form sequences.
    pub fn obstacles(&self, n: Option<usize>) -> (DVector<f64>, DVector<f64>) {
        let d = n.map_or(0.0, |n| self.decay.at(n));
        match &self.kind {
            SequenceKind::LinearForm { .. } => (DVector::zeros(0), DVector::zeros(0)),
            SequenceKind::Obstacle {
                lower,
                upper,
                delta_lower,
                delta_upper,
            } => {
                let shift = |b: &DVector<f64>, db: &DVector<f64>, sign: f64| {
                    DVector::from_iterator(
                        b.len(),
                        b.iter().zip(db.iter()).map(|(&b, &db)| if b.is_finite() { b + sign * d * db } else { b }),
                    )
                };
                (shift(lower, delta_lower, -1.0), shift(upper, delta_upper, 1.0))
            }
        }
    }
}

/// `max(lower, min(upper, u))` nodewise.
pub fn mosco_recovery_cut(u: &DVector<f64>, lower: &DVector<f64>, upper: &DVector<f64>) -> Result<DVector<f64>> {
    check_len("lower obstacle", u.len(), lower.len())?;
    check_len("upper obstacle", u.len(), upper.len())?;
    if (0..u.len()).any(|i| !(lower[i] <= upper[i])) {
        return Err(Error::InvalidParameter("cut requires lower <= upper".into()));
    }
    Ok(DVector::from_iterator(
        u.len(),
        (0..u.len()).map(|i| u[i].min(upper[i]).max(lower[i])),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityRow {
    pub n: usize,
    pub decay: f64,
    /// `‖S(F_n) - S(F)‖_E`
    pub error: f64,
    pub state_norm: f64,
    /// Interior nodes sitting on an obstacle; zero for linear-form runs.
    pub active_set_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub rows: Vec<StabilityRow>,
    /// `‖S(F)‖_E`, the scale of the tolerances.
    pub limit_norm: f64,
    pub limit_active_set_size: usize,
    /// A-priori bound on `sup_n ‖S(F_n)‖_E`.
    pub boundedness_bound: f64,
    pub margin: f64,
    /// Errors never increase along the sequence.
    pub monotone: bool,
    /// Least-squares slope of `-log error` against `log n`.
    pub observed_order: Option<f64>,
    /// Geometric mean of consecutive error ratios.
    pub mean_ratio: Option<f64>,
    /// The conical minorant constant of `F`; for linear forms plus box
    /// indicators it is never the binding constraint and is not computed.
    pub d0: String,
}

impl StabilityReport {
    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.error).collect()
    }

    pub fn max_state_norm(&self) -> f64 {
        self.rows.iter().map(|r| r.state_norm).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,decay,error,state_norm,active_set_size\n");
        for r in &self.rows {
            s.push_str(&format!("{},{:e},{:e},{:e},{}\n", r.n, r.decay, r.error, r.state_norm, r.active_set_size));
        }
        s
    }
}

fn active_set_size(u: &DVector<f64>, lower: &DVector<f64>, upper: &DVector<f64>, tol: f64) -> usize {
    (0..lower.len())
        .filter(|&i| u[i] - lower[i] <= tol || upper[i] - u[i] <= tol)
        .count()
}

/// Solves every member `F_1, ..., F_N` and the limit, in parallel.
pub fn run_stability_experiment(
    base: &HviProblem,
    sequence: &MoscoSequence,
    n_max: usize,
    opts: &SolverOptions,
) -> Result<StabilityReport> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("stability experiment needs at least one member".into()));
    }
    let sys = &base.system;
    let smallness = *sys.smallness()?;
    if !smallness.satisfied() {
        return Err(Error::InvalidParameter(format!(
            "stability experiment needs a positive smallness margin, got {:.3e}",
            smallness.margin
        )));
    }
    log::info!("conical minorant d0: not binding for linear plus indicator F");

    let indices: Vec<Option<usize>> = std::iter::once(None).chain((1..=n_max).map(Some)).collect();
    let solutions = indices
        .par_iter()
        .map(|&n| {
            let p = sequence.member(base, n)?;
            let s = solve(&p, opts)?;
            Ok((p, s.x()))
        })
        .collect::<Result<Vec<_>>>()?;
    let (_, x_lim) = &solutions[0];
    let limit_norm = sys.e_norm(x_lim);
    let tol = 1e-10 * limit_norm.max(1e-300);
    let nu = sys.n_u();

    let active = |n: Option<usize>, x: &DVector<f64>| match sequence.kind {
        SequenceKind::Obstacle { .. } => {
            let (lo, hi) = sequence.obstacles(n);
            active_set_size(&x.rows(0, nu).into_owned(), &lo, &hi, tol)
        }
        SequenceKind::LinearForm { .. } => 0,
    };

    let gamma = smallness.gamma_norm_sq.sqrt();
    let mut bound: f64 = 0.0;
    let mut rows = Vec::with_capacity(n_max);
    for (k, (p, x)) in solutions.iter().enumerate().skip(1) {
        // Strong monotonicity tested against a point z feasible for F_n.
        let z = match sequence.kind {
            SequenceKind::Obstacle { .. } => {
                let (lo, hi) = sequence.obstacles(Some(k));
                let mut z = x_lim.clone();
                let u = mosco_recovery_cut(&x_lim.rows(0, nu).into_owned(), &lo, &hi)?;
                z.rows_mut(0, nu).copy_from(&u);
                z
            }
            SequenceKind::LinearForm { .. } => x_lim.clone(),
        };
        let r = sys.operator(&z) - p.linear_term();
        bound = bound.max(sys.e_norm(&z) + (sys.dual_norm(&r) + smallness.d_j * gamma) / smallness.margin);
        rows.push(StabilityRow {
            n: k,
            decay: sequence.decay.at(k),
            error: sys.e_norm(&(x - x_lim)),
            state_norm: sys.e_norm(x),
            active_set_size: active(Some(k), x),
        });
    }

    let monotone = rows.windows(2).all(|w| w[1].error <= w[0].error);
    let positive: Vec<&StabilityRow> = rows.iter().filter(|r| r.error > 1e-14 * limit_norm.max(1.0)).collect();
    let observed_order = (positive.len() >= 2).then(|| {
        let pts: Vec<(f64, f64)> = positive.iter().map(|r| ((r.n as f64).ln(), -r.error.ln())).collect();
        let m = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
        let (mx, my) = (sx / m, sy / m);
        let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let den: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        num / den
    });
    let mean_ratio = (positive.len() >= 2).then(|| {
        let first = positive[0];
        let last = positive[positive.len() - 1];
        (last.error / first.error).powf(1.0 / (last.n - first.n) as f64)
    });

    Ok(StabilityReport {
        limit_active_set_size: active(None, x_lim),
        rows,
        limit_norm,
        boundedness_bound: bound,
        margin: smallness.margin,
        monotone,
        observed_order,
        mean_ratio,
        d0: "not binding".into(),
    })
}
