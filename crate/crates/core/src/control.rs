//! Optimal control through the control-to-state map.
//!
//! Four kinds: distributed load `f`, boundary load `q`, both, or the obstacle
//! pair. Controls live on coarse grids and are prolongated to the state mesh;
//! gradients are central finite differences of the reduced cost.

use nalgebra::{DMatrix, DVector, Point2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::data::ScalarField;
use crate::error::{check_len, Error, Result};
use crate::hvi::{solve_from, BoxConstraint, CoupledSystem, ExtendedF, HviProblem, HviSolution, SolverOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ControlKind {
    Distributed,
    Boundary,
    DistributedBoundary,
    Obstacle,
}

impl ControlKind {
    pub fn label(self) -> &'static str {
        match self {
            ControlKind::Distributed => "ocp1-distributed",
            ControlKind::Boundary => "ocp2-boundary",
            ControlKind::DistributedBoundary => "ocp3-distributed-boundary",
            ControlKind::Obstacle => "ocp4-obstacle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ControlGrid {
    /// Patches of the bounding box carrying one value of `f` each.
    pub patches: [usize; 2],
    /// Equal arc-length segments of `Γ` carrying one value of `q` each.
    pub segments: usize,
    /// Nodes of the bilinear grid for each obstacle.
    pub obstacle_nodes: [usize; 2],
}

impl Default for ControlGrid {
    fn default() -> Self {
        ControlGrid {
            patches: [4, 4],
            segments: 8,
            obstacle_nodes: [2, 2],
        }
    }
}

/// Coarse control grids and their prolongations onto one coupled system.
#[derive(Debug, Clone)]
pub struct ControlSpace {
    pub kind: ControlKind,
    pub grid: ControlGrid,
    patch_of_triangle: Vec<usize>,
    patch_areas: Vec<f64>,
    segment_of_panel: Vec<usize>,
    segment_lengths: Vec<f64>,
    /// Bilinear interpolation from the obstacle grid to the mesh nodes.
    prolongation: DMatrix<f64>,
    /// Gram matrix of the control norm.
    gram: DMatrix<f64>,
}

fn bounding_box(nodes: &[Point2<f64>]) -> (Point2<f64>, Point2<f64>) {
    let mut lo = nodes[0];
    let mut hi = nodes[0];
    for p in nodes {
        lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    (lo, hi)
}

fn cell(t: f64, n: usize) -> usize {
    ((t * n as f64).floor() as usize).min(n - 1)
}

impl ControlSpace {
    pub fn new(system: &CoupledSystem, kind: ControlKind, grid: ControlGrid) -> Result<Self> {
        let [px, py] = grid.patches;
        let [ox, oy] = grid.obstacle_nodes;
        if px == 0 || py == 0 || grid.segments == 0 || ox < 2 || oy < 2 {
            return Err(Error::InvalidParameter(
                "control grid needs at least one patch and segment and two obstacle nodes per direction".into(),
            ));
        }
        let mesh = &system.mesh;
        let (lo, hi) = bounding_box(&mesh.nodes);
        let (wx, wy) = (hi.x - lo.x, hi.y - lo.y);

        let interior = &system.interior;
        let mut patch_of_triangle = Vec::with_capacity(interior.n_triangles());
        let mut patch_areas = vec![0.0; px * py];
        for k in 0..interior.n_triangles() {
            let c = interior.centroid(k);
            let p = cell((c.x - lo.x) / wx, px) + px * cell((c.y - lo.y) / wy, py);
            patch_of_triangle.push(p);
            patch_areas[p] += interior.area(k);
        }
        let uses_f = matches!(kind, ControlKind::Distributed | ControlKind::DistributedBoundary);
        if uses_f && patch_areas.contains(&0.0) {
            return Err(Error::InvalidParameter(
                "some control patch contains no triangle; coarsen the patch grid or refine the mesh".into(),
            ));
        }

        let panels = &system.operators.boundary.panels;
        let perimeter: f64 = panels.iter().map(|p| p.len).sum();
        let mut segment_of_panel = Vec::with_capacity(panels.len());
        let mut segment_lengths = vec![0.0; grid.segments];
        let mut s = 0.0;
        for p in panels {
            let seg = cell((s + 0.5 * p.len) / perimeter, grid.segments);
            segment_of_panel.push(seg);
            segment_lengths[seg] += p.len;
            s += p.len;
        }
        let uses_q = matches!(kind, ControlKind::Boundary | ControlKind::DistributedBoundary);
        if uses_q && segment_lengths.contains(&0.0) {
            return Err(Error::InvalidParameter("some boundary control segment contains no panel".into()));
        }

        let nn = mesh.n_nodes();
        let mut prolongation = DMatrix::zeros(nn, ox * oy);
        for (i, p) in mesh.nodes.iter().enumerate() {
            let sx = ((p.x - lo.x) / wx * (ox - 1) as f64).clamp(0.0, (ox - 1) as f64);
            let sy = ((p.y - lo.y) / wy * (oy - 1) as f64).clamp(0.0, (oy - 1) as f64);
            let (ix, iy) = ((sx as usize).min(ox - 2), (sy as usize).min(oy - 2));
            let (tx, ty) = (sx - ix as f64, sy - iy as f64);
            prolongation[(i, ix + ox * iy)] += (1.0 - tx) * (1.0 - ty);
            prolongation[(i, ix + 1 + ox * iy)] += tx * (1.0 - ty);
            prolongation[(i, ix + ox * (iy + 1))] += (1.0 - tx) * ty;
            prolongation[(i, ix + 1 + ox * (iy + 1))] += tx * ty;
        }

        let mut space = ControlSpace {
            kind,
            grid,
            patch_of_triangle,
            patch_areas,
            segment_of_panel,
            segment_lengths,
            prolongation,
            gram: DMatrix::zeros(0, 0),
        };
        space.gram = space.assemble_gram(system);
        Ok(space)
    }

    fn assemble_gram(&self, system: &CoupledSystem) -> DMatrix<f64> {
        match self.kind {
            ControlKind::Distributed => DMatrix::from_diagonal(&DVector::from_vec(self.patch_areas.clone())),
            ControlKind::Boundary => DMatrix::from_diagonal(&DVector::from_vec(self.segment_lengths.clone())),
            ControlKind::DistributedBoundary => {
                let d: Vec<f64> = self.patch_areas.iter().chain(&self.segment_lengths).copied().collect();
                DMatrix::from_diagonal(&DVector::from_vec(d))
            }
            ControlKind::Obstacle => {
                // ‖z‖² + |z|₁² + ‖Δ_h z‖² with the lumped discrete Laplacian.
                let m_l = system.interior.lumped_mass();
                let k = &system.stiffness;
                let mut kml = k.clone();
                for j in 0..kml.ncols() {
                    for i in 0..kml.nrows() {
                        kml[(i, j)] /= m_l[i];
                    }
                }
                let h2 = &system.mass + k + k.transpose() * kml;
                let p = &self.prolongation;
                let one = p.transpose() * h2 * p;
                let n = one.nrows();
                let mut g = DMatrix::zeros(2 * n, 2 * n);
                g.view_mut((0, 0), (n, n)).copy_from(&one);
                g.view_mut((n, n), (n, n)).copy_from(&one);
                g
            }
        }
    }

    pub fn dim(&self) -> usize {
        let [px, py] = self.grid.patches;
        let [ox, oy] = self.grid.obstacle_nodes;
        match self.kind {
            ControlKind::Distributed => px * py,
            ControlKind::Boundary => self.grid.segments,
            ControlKind::DistributedBoundary => px * py + self.grid.segments,
            ControlKind::Obstacle => 2 * ox * oy,
        }
    }

    /// Squared control norm: `L²(Ω)`, `L²(Γ)`, their sum, or the discrete
    /// `H²` surrogate of both obstacles.
    pub fn norm_sq(&self, c: &DVector<f64>) -> f64 {
        c.dot(&(&self.gram * c))
    }

    /// Cellwise `f` on the state mesh.
    pub fn f_cells(&self, c: &[f64]) -> Vec<f64> {
        self.patch_of_triangle.iter().map(|&p| c[p]).collect()
    }

    /// Panelwise `q` on the boundary.
    pub fn q_panels(&self, c: &[f64]) -> Vec<f64> {
        self.segment_of_panel.iter().map(|&s| c[s]).collect()
    }

    /// Nodal `(lower, upper)` obstacles.
    pub fn obstacles(&self, c: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let n = self.prolongation.ncols();
        (
            &self.prolongation * c.rows(0, n),
            &self.prolongation * c.rows(n, n),
        )
    }

    /// Admissible-set projection; only obstacle controls are constrained, by
    /// `lower ← min(lower, upper)` on the coarse grid.
    pub fn project(&self, c: &mut DVector<f64>) {
        if self.kind == ControlKind::Obstacle {
            let n = c.len() / 2;
            for i in 0..n {
                c[i] = c[i].min(c[n + i]);
            }
        }
    }

    pub fn is_admissible(&self, c: &DVector<f64>) -> bool {
        self.kind != ControlKind::Obstacle || {
            let n = c.len() / 2;
            (0..n).all(|i| c[i] <= c[n + i])
        }
    }
}

/// Target, regularization and fixed data for one optimal control problem.
#[derive(Debug, Clone)]
pub struct ControlProblem {
    pub system: Arc<CoupledSystem>,
    pub space: ControlSpace,
    /// Interior load of the data that is not controlled.
    pub fixed_f_load: DVector<f64>,
    /// Boundary load of the data that is not controlled.
    pub fixed_q_load: DVector<f64>,
    /// Box used by the non-obstacle kinds.
    pub fixed_extended: ExtendedF,
    /// `(u_d, v_d)` in `E`-coefficients.
    pub target: DVector<f64>,
    pub rho: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub total: f64,
    /// `½‖S(c) - target‖²_E`
    pub misfit: f64,
    /// `(ρ/2)‖c‖²`
    pub regularization: f64,
}

impl ControlProblem {
    pub fn new(
        system: Arc<CoupledSystem>,
        kind: ControlKind,
        grid: ControlGrid,
        fixed_f: &ScalarField,
        fixed_q: &ScalarField,
        fixed_extended: ExtendedF,
        target: DVector<f64>,
        rho: f64,
    ) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidParameter(format!("rho must be positive, got {rho}")));
        }
        check_len("control target", system.n(), target.len())?;
        let space = ControlSpace::new(&system, kind, grid)?;
        let fixed_f_load = system.interior.load_fn(|p| fixed_f.eval(p));
        let fixed_q_load = system.boundary_load(|p| fixed_q.eval(p));
        Ok(ControlProblem {
            system,
            space,
            fixed_f_load,
            fixed_q_load,
            fixed_extended,
            target,
            rho,
        })
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn with_target(&self, target: DVector<f64>) -> Result<Self> {
        check_len("control target", self.system.n(), target.len())?;
        Ok(ControlProblem { target, ..self.clone() })
    }

    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidParameter(format!("rho must be positive, got {rho}")));
        }
        Ok(ControlProblem { rho, ..self.clone() })
    }

    /// The state problem for control `c`.
    pub fn state_problem(&self, c: &DVector<f64>) -> Result<HviProblem> {
        check_len("control", self.dim(), c.len())?;
        let sys = &self.system;
        let interior = &sys.interior;
        let np = self.space.grid.patches[0] * self.space.grid.patches[1];
        let (b_f, b_q, extended) = match self.space.kind {
            ControlKind::Distributed => (
                interior.load_cellwise(&self.space.f_cells(c.as_slice()))?,
                self.fixed_q_load.clone(),
                self.fixed_extended.clone(),
            ),
            ControlKind::Boundary => (
                self.fixed_f_load.clone(),
                sys.boundary_load_panelwise(&self.space.q_panels(c.as_slice()))?,
                self.fixed_extended.clone(),
            ),
            ControlKind::DistributedBoundary => (
                interior.load_cellwise(&self.space.f_cells(&c.as_slice()[..np]))?,
                sys.boundary_load_panelwise(&self.space.q_panels(&c.as_slice()[np..]))?,
                self.fixed_extended.clone(),
            ),
            ControlKind::Obstacle => {
                if !self.space.is_admissible(c) {
                    return Err(Error::Infeasible("obstacle control violates lower <= upper".into()));
                }
                let (lo, hi) = self.space.obstacles(c);
                (
                    self.fixed_f_load.clone(),
                    self.fixed_q_load.clone(),
                    ExtendedF::with_bounds(BoxConstraint::new(lo, hi)?),
                )
            }
        };
        HviProblem::new(sys.clone(), sys.lambda_from_loads(&b_f, &b_q)?, extended)
    }

    /// Cost from an already computed state.
    pub fn cost_of_state(&self, c: &DVector<f64>, x: &DVector<f64>) -> CostBreakdown {
        let misfit = 0.5 * self.system.e_norm(&(x - &self.target)).powi(2);
        let regularization = 0.5 * self.rho * self.space.norm_sq(c);
        CostBreakdown {
            total: misfit + regularization,
            misfit,
            regularization,
        }
    }
}

pub fn control_to_state(
    problem: &ControlProblem,
    control: &DVector<f64>,
    start: Option<&DVector<f64>>,
    opts: &SolverOptions,
) -> Result<HviSolution> {
    let p = problem.state_problem(control)?;
    let zero = DVector::zeros(p.n());
    solve_from(&p, start.unwrap_or(&zero), opts)
}

pub fn cost(problem: &ControlProblem, control: &DVector<f64>, opts: &SolverOptions) -> Result<CostBreakdown> {
    let x = control_to_state(problem, control, None, opts)?.x();
    Ok(problem.cost_of_state(control, &x))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerOptions {
    pub max_iterations: usize,
    /// Budget of state solves.
    pub max_evaluations: usize,
    /// Relative finite-difference step.
    pub fd_step: f64,
    /// Stop when `‖∇I‖ ≤ gtol · max(I, floor)`.
    pub gtol: f64,
    /// Stop when the relative decrease over `patience` iterations falls below `ftol`.
    pub ftol: f64,
    pub patience: usize,
    pub solver: SolverOptions,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        OptimizerOptions {
            max_iterations: 300,
            max_evaluations: 40_000,
            fd_step: 1e-4,
            gtol: 1e-8,
            ftol: 1e-10,
            patience: 5,
            solver: SolverOptions {
                outer_tol: 1e-12,
                residual_directions: 0,
                ..SolverOptions::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlResult {
    pub kind: ControlKind,
    pub control: Vec<f64>,
    /// Cost after every accepted step, starting with the initial control.
    pub cost_trajectory: Vec<f64>,
    pub final_cost: CostBreakdown,
    pub state: Vec<f64>,
    pub iterations: usize,
    pub evaluations: usize,
    /// Trial points whose state solve failed.
    pub rejected_trials: usize,
    pub gradient_norm: f64,
    pub converged: bool,
    pub budget_exhausted: bool,
}

struct Evaluator<'a> {
    problem: &'a ControlProblem,
    opts: &'a OptimizerOptions,
    count: std::sync::atomic::AtomicUsize,
    failures: std::sync::atomic::AtomicUsize,
}

impl Evaluator<'_> {
    fn eval(&self, c: &DVector<f64>, start: &DVector<f64>) -> Option<(f64, DVector<f64>)> {
        use std::sync::atomic::Ordering;
        self.count.fetch_add(1, Ordering::Relaxed);
        match control_to_state(self.problem, c, Some(start), &self.opts.solver) {
            Ok(s) => {
                let x = s.x();
                Some((self.problem.cost_of_state(c, &x).total, x))
            }
            Err(e) => {
                log::debug!("state solve failed at trial control: {e}");
                self.failures.fetch_add(1, Ordering::Relaxed);
                None
            }
        }
    }

    fn gradient(&self, c: &DVector<f64>, state: &DVector<f64>) -> Result<DVector<f64>> {
        let space = &self.problem.space;
        let parts = (0..c.len())
            .into_par_iter()
            .map(|i| {
                let h = self.opts.fd_step * c[i].abs().max(1.0);
                let mut plus = c.clone();
                plus[i] += h;
                let mut minus = c.clone();
                minus[i] -= h;
                space.project(&mut plus);
                space.project(&mut minus);
                let span = plus[i] - minus[i];
                if span == 0.0 {
                    return Ok(0.0);
                }
                match (self.eval(&plus, state), self.eval(&minus, state)) {
                    (Some((fp, _)), Some((fm, _))) => Ok((fp - fm) / span),
                    _ => Err(Error::Solver(format!("state solve failed in gradient component {i}"))),
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(DVector::from_vec(parts))
    }

    fn used(&self) -> usize {
        self.count.load(std::sync::atomic::Ordering::Relaxed)
    }
}

/// Projected BFGS with central finite-difference gradients and a
/// backtracking line search. Returns the best control found.
pub fn minimize(problem: &ControlProblem, start: &DVector<f64>, opts: &OptimizerOptions) -> Result<ControlResult> {
    check_len("initial control", problem.dim(), start.len())?;
    let ev = Evaluator {
        problem,
        opts,
        count: 0.into(),
        failures: 0.into(),
    };
    let space = &problem.space;
    let n = problem.dim();
    let mut c = start.clone();
    space.project(&mut c);
    let zero = DVector::zeros(problem.system.n());
    let (mut f, mut x) = ev
        .eval(&c, &zero)
        .ok_or_else(|| Error::Solver("state solve failed at the initial control".into()))?;
    let mut trajectory = vec![f];
    let mut g = ev.gradient(&c, &x)?;
    let mut h_inv = DMatrix::<f64>::identity(n, n);
    let mut scaled = false;
    let mut converged = false;
    let mut budget_exhausted = false;
    let mut iterations = 0;
    let floor = 1e-300;

    while iterations < opts.max_iterations {
        if g.norm() <= opts.gtol * f.max(floor) {
            converged = true;
            break;
        }
        if ev.used() + 2 * n + 30 > opts.max_evaluations {
            budget_exhausted = true;
            break;
        }
        let mut d = -(&h_inv * &g);
        if d.dot(&g) >= 0.0 {
            h_inv = DMatrix::identity(n, n);
            d = -g.clone();
        }
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let mut trial = &c + t * &d;
            space.project(&mut trial);
            let s = &trial - &c;
            let slope = g.dot(&s);
            if slope < 0.0 {
                if let Some((ft, xt)) = ev.eval(&trial, &x) {
                    if ft <= f + 1e-4 * slope {
                        accepted = Some((trial, ft, xt));
                        break;
                    }
                }
            }
            t *= 0.5;
        }
        let Some((c_new, f_new, x_new)) = accepted else {
            if h_inv != DMatrix::identity(n, n) {
                h_inv = DMatrix::identity(n, n);
                scaled = false;
                continue;
            }
            converged = true;
            break;
        };
        let g_new = ev.gradient(&c_new, &x_new)?;
        let s = &c_new - &c;
        let y = &g_new - &g;
        let sy = s.dot(&y);
        if sy > 1e-12 * s.norm() * y.norm() {
            if !scaled {
                h_inv *= sy / y.dot(&y);
                scaled = true;
            }
            let rho = 1.0 / sy;
            let hy = &h_inv * &y;
            let yhy = y.dot(&hy);
            h_inv += (rho * rho * yhy + rho) * (&s * s.transpose()) - rho * (&hy * s.transpose() + &s * hy.transpose());
        }
        let decrease = f - f_new;
        c = c_new;
        f = f_new;
        x = x_new;
        g = g_new;
        trajectory.push(f);
        iterations += 1;
        let k = trajectory.len();
        if k > opts.patience && decrease >= 0.0 {
            let old = trajectory[k - 1 - opts.patience];
            if old - f <= opts.ftol * old.abs().max(floor) {
                converged = true;
                break;
            }
        }
    }

    Ok(ControlResult {
        kind: space.kind,
        final_cost: problem.cost_of_state(&c, &x),
        control: c.iter().copied().collect(),
        cost_trajectory: trajectory,
        state: x.iter().copied().collect(),
        iterations,
        evaluations: ev.used(),
        rejected_trials: ev.failures.load(std::sync::atomic::Ordering::Relaxed),
        gradient_norm: g.norm(),
        converged,
        budget_exhausted,
    })
}

/// Manufactured problem whose target is the state of `true_control`.
pub fn inverse_crime_setup(
    system: Arc<CoupledSystem>,
    kind: ControlKind,
    grid: ControlGrid,
    fixed_f: &ScalarField,
    fixed_q: &ScalarField,
    fixed_extended: ExtendedF,
    true_control: &DVector<f64>,
    rho: f64,
    opts: &SolverOptions,
) -> Result<ControlProblem> {
    let provisional = ControlProblem::new(
        system.clone(),
        kind,
        grid,
        fixed_f,
        fixed_q,
        fixed_extended,
        DVector::zeros(system.n()),
        rho,
    )?;
    if !provisional.space.is_admissible(true_control) {
        return Err(Error::InvalidParameter("true obstacle control violates lower <= upper".into()));
    }
    let target = control_to_state(&provisional, true_control, None, opts)?.x();
    provisional.with_target(target)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartReport {
    pub best_costs: Vec<f64>,
    pub best: f64,
    /// `(max - min) / min` of the best costs.
    pub spread: f64,
}

/// Runs `n` minimizations from starts uniform in `centre ± radius`.
pub fn restarts(
    problem: &ControlProblem,
    centre: &DVector<f64>,
    radius: f64,
    n: usize,
    seed: u64,
    opts: &OptimizerOptions,
) -> Result<RestartReport> {
    if n == 0 {
        return Err(Error::InvalidParameter("at least one restart is required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<DVector<f64>> = (0..n)
        .map(|_| centre + DVector::from_fn(centre.len(), |_, _| radius * rng.random_range(-1.0..1.0)))
        .collect();
    let best_costs = starts
        .par_iter()
        .map(|s| minimize(problem, s, opts).map(|r| r.final_cost.total))
        .collect::<Result<Vec<f64>>>()?;
    let best = best_costs.iter().copied().fold(f64::INFINITY, f64::min);
    let worst = best_costs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(RestartReport {
        spread: (worst - best) / best.abs().max(1e-300),
        best,
        best_costs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub rho: f64,
    pub cost: f64,
    pub misfit: f64,
    /// `‖c - c_true‖ / ‖c_true‖` in the control norm.
    pub control_error: f64,
}

/// Minimizes for each `ρ` from the zero control and records the recovery error.
pub fn rho_sweep(
    problem: &ControlProblem,
    true_control: &DVector<f64>,
    rhos: &[f64],
    opts: &OptimizerOptions,
) -> Result<Vec<SweepRow>> {
    rhos.iter()
        .map(|&rho| {
            let p = problem.with_rho(rho)?;
            let r = minimize(&p, &DVector::zeros(p.dim()), opts)?;
            Ok(SweepRow {
                rho,
                cost: r.final_cost.total,
                misfit: r.final_cost.misfit,
                control_error: relative_control_error(&p.space, &DVector::from_vec(r.control), true_control),
            })
        })
        .collect()
}

pub fn relative_control_error(space: &ControlSpace, c: &DVector<f64>, truth: &DVector<f64>) -> f64 {
    (space.norm_sq(&(c - truth)) / space.norm_sq(truth)).sqrt()
}

/// Interior nodes on the lower and upper obstacle, within `tol`.
pub fn active_sets(u: &DVector<f64>, lower: &DVector<f64>, upper: &DVector<f64>, tol: f64) -> (Vec<usize>, Vec<usize>) {
    let lo = (0..lower.len()).filter(|&i| u[i] - lower[i] <= tol).collect();
    let hi = (0..upper.len()).filter(|&i| upper[i] - u[i] <= tol).collect();
    (lo, hi)
}
