//! Front-end for the `hemivar` binary: argument parsing, scenario
//! resolution, experiment drivers and artifact emission.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hemivar::bem::{circle_spectral_study, observed_orders, SpectrumRow};
use hemivar::control::{active_sets, minimize, relative_control_error, restarts, rho_sweep, ControlKind, ControlResult};
use hemivar::exterior::{
    evaluate_exterior, harmonicity_defect, probe_ring, radiation_profile, reconstruct_u2, transmission_residuals,
    TransmissionReport,
};
use hemivar::geometry::{rescale_for_capacity, Mesh2D};
use hemivar::hvi::{solve, CoupledSystem, HviProblem, HviSolution, SmallnessReport};
use hemivar::scenario::{fixture, Experiment, Scenario, SequenceChoice, FIXTURES};
use hemivar::stability::run_stability_experiment;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "hemivar", version, about = "Nonmonotone transmission problems by FEM-BEM coupling")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one coupled problem and report the certificate and residuals.
    Solve(Common),
    /// Solve a Mosco sequence and its limit.
    Stability(StabilityArgs),
    /// Inverse-crime optimal control.
    Control(ControlArgs),
    /// Evaluate the reconstructed exterior field on a grid.
    Field(Common),
    /// Exterior Steklov eigenvalues on a circle against `n/R`.
    Spectra(Common),
    /// Shipped fixtures.
    List,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// TOML scenario file.
    #[arg(long, conflicts_with = "fixture")]
    pub config: Option<PathBuf>,
    /// Shipped scenario; see `hemivar list`.
    #[arg(long)]
    pub fixture: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "hemivar-out")]
    pub out: PathBuf,
    /// Size of the worker pool; all cores when absent.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Overrides the target element diameter.
    #[arg(long)]
    pub h: Option<f64>,
    /// Mesh in the plain-text format, used instead of meshing the geometry.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SequenceArg {
    Linear,
    Obstacle,
}

#[derive(Debug, Clone, Args)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub kind: Option<SequenceArg>,
    /// Number of sequence members.
    #[arg(long = "N")]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ControlArg {
    Distributed,
    Boundary,
    DistributedBoundary,
    Obstacle,
}

#[derive(Debug, Clone, Args)]
pub struct ControlArgs {
    #[command(flatten)]
    pub common: Common,
    /// Selects the matching inverse-crime fixture when no scenario is given.
    #[arg(long, value_enum)]
    pub kind: Option<ControlArg>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub restarts: Option<usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solve failed: {0}")]
    Solve(String),
    #[error("cannot write artifacts: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solve(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn solve_err(e: impl std::fmt::Display) -> CliError {
    CliError::Solve(e.to_string())
}

/// Output directory; files are written one at a time.
pub struct Artifacts {
    dir: PathBuf,
}

impl Artifacts {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        Ok(Artifacts { dir: dir.to_path_buf() })
    }

    pub fn text(&self, name: &str, body: &str) -> Result<(), CliError> {
        fs::write(self.dir.join(name), body)?;
        Ok(())
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), CliError> {
        let mut s = serde_json::to_string_pretty(value).map_err(solve_err)?;
        s.push('\n');
        self.text(name, &s)
    }

    pub fn csv<T: Serialize>(&self, name: &str, rows: &[T]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(self.dir.join(name)).map_err(|e| CliError::Io(e.into()))?;
        for r in rows {
            w.serialize(r).map_err(|e| CliError::Io(e.into()))?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::List => {
            for f in FIXTURES {
                println!("{:<30} {}", f.name, f.description);
            }
            Ok(())
        }
        Command::Solve(c) => execute("solve", &c, |_| Ok(())),
        Command::Field(c) => execute("field", &c, |_| Ok(())),
        Command::Spectra(c) => execute("spectra", &c, |_| Ok(())),
        Command::Stability(a) => {
            let mut common = a.common.clone();
            if common.config.is_none() && common.fixture.is_none() && a.kind == Some(SequenceArg::Obstacle) {
                common.fixture = Some("stability-obstacle".into());
            }
            execute("stability", &common, |s| {
                if let Experiment::Stability(c) = &mut s.experiment {
                    if let Some(k) = a.kind {
                        c.sequence = match k {
                            SequenceArg::Linear => SequenceChoice::Linear,
                            SequenceArg::Obstacle => SequenceChoice::Obstacle,
                        };
                    }
                    if let Some(n) = a.n {
                        c.n = n;
                    }
                }
                Ok(())
            })
        }
        Command::Control(a) => {
            let mut common = a.common.clone();
            if common.config.is_none() && common.fixture.is_none() {
                let name = match a.kind.unwrap_or(ControlArg::Distributed) {
                    ControlArg::Distributed => "ocp1-inverse-crime",
                    ControlArg::Boundary => "ocp2-inverse-crime",
                    ControlArg::DistributedBoundary => "ocp3-inverse-crime",
                    ControlArg::Obstacle => "ocp4-obstacle",
                };
                common.fixture = Some(name.into());
            }
            execute("control", &common, |s| {
                if let Experiment::Control(c) = &mut s.experiment {
                    if let Some(k) = a.kind {
                        let kind = match k {
                            ControlArg::Distributed => ControlKind::Distributed,
                            ControlArg::Boundary => ControlKind::Boundary,
                            ControlArg::DistributedBoundary => ControlKind::DistributedBoundary,
                            ControlArg::Obstacle => ControlKind::Obstacle,
                        };
                        if kind != c.kind {
                            return Err(CliError::Config(format!(
                                "--kind {} disagrees with the scenario's control kind {}",
                                kind.label(),
                                c.kind.label()
                            )));
                        }
                    }
                    if let Some(r) = a.rho {
                        c.rho = r;
                    }
                    if let Some(r) = a.restarts {
                        c.restarts = r;
                    }
                }
                Ok(())
            })
        }
    }
}

const DEFAULT_FIXTURES: [(&str, &str); 5] = [
    ("solve", "square-nonmonotone"),
    ("stability", "stability-linear"),
    ("control", "ocp1-inverse-crime"),
    ("field", "square-nonmonotone"),
    ("spectra", "circle-spectral"),
];

/// Scenario named by `--config` or `--fixture`, or the subcommand's default
/// fixture. A fixture built for another experiment keeps its problem and gets
/// the default options of `command`.
pub fn resolve_scenario(command: &str, common: &Common) -> Result<Scenario, CliError> {
    let mut scenario = if let Some(path) = &common.config {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let s: Scenario = toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if s.experiment.name() != command {
            return Err(CliError::Config(format!(
                "{} describes a '{}' experiment, not '{command}'",
                path.display(),
                s.experiment.name()
            )));
        }
        s
    } else {
        let name = common.fixture.clone().unwrap_or_else(|| {
            DEFAULT_FIXTURES.iter().find(|(c, _)| *c == command).map(|(_, f)| f.to_string()).unwrap_or_default()
        });
        let mut s = fixture(&name).ok_or_else(|| CliError::Config(format!("unknown fixture '{name}'")))?;
        if s.experiment.name() != command {
            s.experiment = Experiment::default_for(command).expect("known subcommand");
        }
        s
    };
    if let Some(seed) = common.seed {
        scenario.seed = seed;
    }
    scenario.solver.seed = scenario.seed;
    if let (Some(h), Some(p)) = (common.h, scenario.problem.as_mut()) {
        p.geometry.h = h;
    }
    Ok(scenario)
}

fn execute(
    command: &str,
    common: &Common,
    adjust: impl FnOnce(&mut Scenario) -> Result<(), CliError>,
) -> Result<(), CliError> {
    let mut scenario = resolve_scenario(command, common)?;
    adjust(&mut scenario)?;
    scenario.validate().map_err(config_err)?;
    if common.workers == Some(0) {
        return Err(CliError::Config("--workers must be positive".into()));
    }
    let mesh = common
        .mesh
        .as_ref()
        .map(|p| {
            let text = fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            Mesh2D::from_text(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))
        })
        .transpose()?;

    let out = Artifacts::create(&common.out)?;
    let mut resolved = String::from("# Resolved scenario: every default filled in.\n");
    resolved.push_str(&toml::to_string_pretty(&scenario).map_err(config_err)?);
    out.text("resolved_config.toml", &resolved)?;

    let work = || dispatch(&scenario, mesh, &out);
    match common.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(config_err)?
            .install(work),
        None => work(),
    }
}

/// A problem assembled from the scenario, on an imported mesh if given.
struct Assembled {
    problem: HviProblem,
    scale: f64,
}

fn assemble(scenario: &Scenario, mesh: Option<Mesh2D>) -> Result<Assembled, CliError> {
    let config = scenario.problem.as_ref().expect("validated");
    let (system, scale) = match mesh {
        Some(m) => {
            let (m, scale) = rescale_for_capacity(&m);
            let sys = CoupledSystem::new(m, config.nonlinearity, config.friction).map_err(config_err)?;
            (Arc::new(sys), scale)
        }
        None => config.system().map_err(config_err)?,
    };
    let problem = config.problem_on(system).map_err(config_err)?;
    Ok(Assembled { problem, scale })
}

fn dispatch(scenario: &Scenario, mesh: Option<Mesh2D>, out: &Artifacts) -> Result<(), CliError> {
    match &scenario.experiment {
        Experiment::Solve => run_solve(scenario, mesh, out),
        Experiment::Stability(_) => run_stability(scenario, mesh, out),
        Experiment::Control(_) => run_control(scenario, mesh, out),
        Experiment::Field(_) => run_field(scenario, mesh, out),
        Experiment::Spectra(_) => run_spectra(scenario, out),
    }
}

#[derive(Serialize)]
struct SolveReport<'a> {
    converged: bool,
    margin: f64,
    smallness: SmallnessReport,
    contraction_bound: f64,
    capacity_scale: f64,
    mesh_h: f64,
    interior_unknowns: usize,
    gamma_s_unknowns: usize,
    outer_iterations: usize,
    energy: f64,
    hvi_residual: f64,
    radiation_constant: f64,
    log_coefficient: f64,
    transmission: TransmissionReport,
    lower_active: Vec<usize>,
    upper_active: Vec<usize>,
    solution: &'a HviSolution,
}

#[derive(Serialize)]
struct TraceRow {
    node: usize,
    x: f64,
    y: f64,
    part: &'static str,
    trace: f64,
    jump: f64,
    neumann: f64,
}

fn run_solve(scenario: &Scenario, mesh: Option<Mesh2D>, out: &Artifacts) -> Result<(), CliError> {
    let Assembled { problem, scale } = assemble(scenario, mesh)?;
    let sys = &problem.system;
    let config = scenario.problem.as_ref().expect("validated");
    let smallness = *sys.smallness().map_err(solve_err)?;
    let sol = solve(&problem, &scenario.solver).map_err(solve_err)?;
    let x = sol.x();
    let data = reconstruct_u2(&problem, &x).map_err(solve_err)?;
    let b_q = sys.boundary_load(|p| config.q.eval(p));
    let transmission = transmission_residuals(&problem, &x, &b_q).map_err(solve_err)?;
    let (lower_active, upper_active) = match &problem.extended.bounds {
        Some(b) => {
            let (u, _) = sys.split(&x);
            active_sets(&u, &b.lower, &b.upper, 1e-8 * sys.e_norm(&x).max(1.0))
        }
        None => (vec![], vec![]),
    };
    let report = SolveReport {
        converged: sol.converged,
        margin: smallness.margin,
        smallness,
        contraction_bound: smallness.contraction_bound(),
        capacity_scale: scale,
        mesh_h: sys.mesh.h,
        interior_unknowns: sys.n_u(),
        gamma_s_unknowns: sys.n_v(),
        outer_iterations: sol.outer_iterations,
        energy: problem.energy(&x),
        hvi_residual: sol.residual,
        radiation_constant: data.a,
        log_coefficient: data.log_coefficient,
        transmission,
        lower_active,
        upper_active,
        solution: &sol,
    };
    out.json("solution.json", &report)?;
    out.text("mesh.txt", &sys.mesh.to_text())?;

    let (_, v) = sys.split(&x);
    let jump = sys.dofs.expand_gamma_s(&v);
    let nb = sys.dofs.n_boundary();
    let rows: Vec<TraceRow> = (0..nb)
        .map(|k| {
            let node = sys.dofs.boundary_dofs[k];
            let p = sys.mesh.nodes[node];
            let part = if sys.dofs.gamma_s_dofs.contains(&k) { "S" } else { "T" };
            TraceRow {
                node,
                x: p.x,
                y: p.y,
                part,
                trace: data.dirichlet[k],
                jump: jump[k],
                neumann: 0.5 * (data.neumann[k] + data.neumann[(k + nb - 1) % nb]),
            }
        })
        .collect();
    out.csv("trace.csv", &rows)?;
    println!(
        "converged={} margin={:.6e} outer_iterations={} energy={:.12e}",
        sol.converged, smallness.margin, sol.outer_iterations, report.energy
    );
    Ok(())
}

fn run_stability(scenario: &Scenario, mesh: Option<Mesh2D>, out: &Artifacts) -> Result<(), CliError> {
    let Experiment::Stability(config) = &scenario.experiment else { unreachable!() };
    let Assembled { problem, .. } = assemble(scenario, mesh)?;
    let sequence = config.sequence(&problem, scenario.seed).map_err(config_err)?;
    let report = run_stability_experiment(&problem, &sequence, config.n, &scenario.solver).map_err(solve_err)?;
    out.json("stability.json", &report)?;
    out.text("stability.csv", &report.to_csv())?;
    println!(
        "members={} monotone={} final_error={:.6e} boundedness_bound={:.6e}",
        report.rows.len(),
        report.monotone,
        report.rows.last().map_or(f64::NAN, |r| r.error),
        report.boundedness_bound
    );
    Ok(())
}

#[derive(Serialize)]
struct ControlReport<'a> {
    label: &'static str,
    rho: f64,
    dimension: usize,
    true_control: &'a [f64],
    control_error: f64,
    /// Obstacle controls only: active sets of the recovered and the true state.
    active_sets: Option<ActiveSetComparison>,
    restarts: Option<hemivar::control::RestartReport>,
    result: &'a ControlResult,
}

#[derive(Serialize)]
struct ActiveSetComparison {
    recovered_lower: Vec<usize>,
    recovered_upper: Vec<usize>,
    true_lower: Vec<usize>,
    true_upper: Vec<usize>,
    exact: bool,
}

#[derive(Serialize)]
struct CostRow {
    iteration: usize,
    cost: f64,
}

fn run_control(scenario: &Scenario, mesh: Option<Mesh2D>, out: &Artifacts) -> Result<(), CliError> {
    let Experiment::Control(config) = &scenario.experiment else { unreachable!() };
    let Assembled { problem, .. } = assemble(scenario, mesh)?;
    let problem_config = scenario.problem.as_ref().expect("validated");
    let control = config
        .setup(problem_config, problem.system.clone(), &config.optimizer.solver)
        .map_err(config_err)?;
    let start = config.start_vector(control.dim());
    let result = minimize(&control, &start, &config.optimizer).map_err(solve_err)?;
    let truth = nalgebra::DVector::from_vec(config.true_control.clone());
    let recovered = nalgebra::DVector::from_vec(result.control.clone());
    let control_error = relative_control_error(&control.space, &recovered, &truth);

    let active = (config.kind == ControlKind::Obstacle).then(|| {
        let sys = &control.system;
        let nu = sys.n_u();
        let tol = 1e-8 * sys.e_norm(&control.target).max(1.0);
        let (lo, hi) = control.space.obstacles(&recovered);
        let (rl, ru) = active_sets(&nalgebra::DVector::from_column_slice(&result.state[..nu]), &lo, &hi, tol);
        let (tlo, thi) = control.space.obstacles(&truth);
        let (tl, tu) = active_sets(&control.target.rows(0, nu).into_owned(), &tlo, &thi, tol);
        ActiveSetComparison {
            exact: rl == tl && ru == tu,
            recovered_lower: rl,
            recovered_upper: ru,
            true_lower: tl,
            true_upper: tu,
        }
    });
    let restart_report = (config.restarts > 0)
        .then(|| restarts(&control, &start, config.restart_radius, config.restarts, scenario.seed, &config.optimizer))
        .transpose()
        .map_err(solve_err)?;
    if !config.rho_sweep.is_empty() {
        let rows = rho_sweep(&control, &truth, &config.rho_sweep, &config.optimizer).map_err(solve_err)?;
        out.csv("rho_sweep.csv", &rows)?;
    }

    let report = ControlReport {
        label: config.kind.label(),
        rho: config.rho,
        dimension: control.dim(),
        true_control: &config.true_control,
        control_error,
        active_sets: active,
        restarts: restart_report,
        result: &result,
    };
    out.json("control.json", &report)?;
    let rows: Vec<CostRow> =
        result.cost_trajectory.iter().enumerate().map(|(iteration, &cost)| CostRow { iteration, cost }).collect();
    out.csv("cost_trajectory.csv", &rows)?;
    println!(
        "{} iterations={} cost={:.6e} control_error={:.3e}",
        config.kind.label(),
        result.iterations,
        result.final_cost.total,
        control_error
    );
    Ok(())
}

#[derive(Serialize)]
struct FieldRow {
    x: f64,
    y: f64,
    u2: f64,
}

#[derive(Serialize)]
struct FieldReport {
    radiation_constant: f64,
    log_coefficient: f64,
    field_scale: f64,
    min_distance: f64,
    evaluated_points: usize,
    skipped_points: usize,
    harmonicity_defect: f64,
    harmonicity_ring_radius: f64,
    radiation_radii: Vec<f64>,
    radiation_remainder: Vec<f64>,
}

fn run_field(scenario: &Scenario, mesh: Option<Mesh2D>, out: &Artifacts) -> Result<(), CliError> {
    let Experiment::Field(config) = &scenario.experiment else { unreachable!() };
    let Assembled { problem, .. } = assemble(scenario, mesh)?;
    let sys = &problem.system;
    let boundary = &sys.operators.boundary;
    let sol = solve(&problem, &scenario.solver).map_err(solve_err)?;
    let data = reconstruct_u2(&problem, &sol.x()).map_err(solve_err)?;
    let min_distance = config.min_distance.unwrap_or(sys.mesh.h);

    let all = config.points();
    let points: Vec<_> =
        all.iter().copied().filter(|p| !boundary.encloses(p) && boundary.distance(p) > min_distance).collect();
    let values = evaluate_exterior(boundary, &data, &points, min_distance).map_err(solve_err)?;
    let rows: Vec<FieldRow> = points.iter().zip(&values).map(|(p, &u2)| FieldRow { x: p.x, y: p.y, u2 }).collect();
    out.csv("field.csv", &rows)?;

    let ring = probe_ring(boundary, &data, config.ring_factor, 64);
    let defect =
        harmonicity_defect(boundary, &data, &ring, config.harmonicity_delta, min_distance).map_err(solve_err)?;
    let diam = boundary.diameter();
    let radii: Vec<f64> = (0..8).map(|k| diam * 4.0 * 2f64.powi(k)).collect();
    let remainder = radiation_profile(boundary, &data, 0.3, &radii).map_err(solve_err)?;
    let report = FieldReport {
        radiation_constant: data.a,
        log_coefficient: data.log_coefficient,
        field_scale: data.scale(),
        min_distance,
        evaluated_points: points.len(),
        skipped_points: all.len() - points.len(),
        harmonicity_defect: defect,
        harmonicity_ring_radius: config.ring_factor * diam,
        radiation_radii: radii,
        radiation_remainder: remainder,
    };
    out.json("field.json", &report)?;
    println!(
        "points={} skipped={} a={:.6e} harmonicity_defect={:.3e}",
        report.evaluated_points, report.skipped_points, data.a, defect
    );
    Ok(())
}

#[derive(Serialize)]
struct OrderRow {
    mode: usize,
    panels: usize,
    order: f64,
}

#[derive(Serialize)]
struct SpectraReport<'a> {
    radius: f64,
    rows: &'a [SpectrumRow],
    orders: &'a [OrderRow],
}

#[derive(Serialize)]
struct SpectrumCsvRow {
    panels: usize,
    mode: usize,
    computed_cos: f64,
    computed_sin: f64,
    exact: f64,
    rel_error: f64,
}

fn run_spectra(scenario: &Scenario, out: &Artifacts) -> Result<(), CliError> {
    let Experiment::Spectra(config) = &scenario.experiment else { unreachable!() };
    let rows = circle_spectral_study(config.radius, &config.panels, &config.modes).map_err(solve_err)?;
    let orders: Vec<OrderRow> =
        observed_orders(&rows).into_iter().map(|(mode, panels, order)| OrderRow { mode, panels, order }).collect();
    out.json(
        "spectra.json",
        &SpectraReport {
            radius: config.radius,
            rows: &rows,
            orders: &orders,
        },
    )?;
    let csv_rows: Vec<SpectrumCsvRow> = rows
        .iter()
        .map(|r| SpectrumCsvRow {
            panels: r.panels,
            mode: r.mode,
            computed_cos: r.computed[0],
            computed_sin: r.computed[1],
            exact: r.exact,
            rel_error: r.rel_error,
        })
        .collect();
    out.csv("spectra.csv", &csv_rows)?;
    for r in &rows {
        println!("panels={:<4} mode={} rel_error={:.3e}", r.panels, r.mode, r.rel_error);
    }
    Ok(())
}
