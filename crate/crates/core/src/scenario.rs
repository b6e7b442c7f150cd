//! Declarative problem descriptions and the shipped fixtures.

use std::sync::Arc;

use nalgebra::{DVector, Point2};
use serde::{Deserialize, Serialize};

use crate::control::{inverse_crime_setup, ControlGrid, ControlKind, ControlProblem, ControlSpace, OptimizerOptions};
use crate::data::ScalarField;
use crate::error::{Error, Result};
use crate::fem::NonlinearityP;
use crate::geometry::{build_mesh, rescale_for_capacity, Mesh2D, PolygonSpec};
use crate::hvi::{BoxConstraint, CoupledSystem, ExtendedF, HviProblem, SolverOptions};
use crate::stability::{make_linear_sequence, make_obstacle_sequence, random_perturbation, Decay, MoscoSequence};
use crate::superpotential::FrictionLaw;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Shape {
    /// Square centred at the origin; vertices from the lower-left corner.
    Square { side: f64 },
    Rectangle { origin: [f64; 2], width: f64, height: f64 },
    /// Regular polygon with its first vertex on the positive x-axis.
    Regular { sides: usize, radius: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryConfig {
    pub shape: Shape,
    /// Arcs `[start, end]` of polygon vertices, counterclockwise.
    pub gamma_s_arcs: Vec<[usize; 2]>,
    /// Target element diameter.
    pub h: f64,
}

impl GeometryConfig {
    pub fn polygon(&self) -> Result<PolygonSpec> {
        let arcs = self.gamma_s_arcs.iter().map(|a| (a[0], a[1])).collect();
        match &self.shape {
            Shape::Square { side } => {
                let h = 0.5 * side;
                PolygonSpec::rectangle(Point2::new(-h, -h), *side, *side, arcs)
            }
            Shape::Rectangle { origin, width, height } => {
                PolygonSpec::rectangle(Point2::new(origin[0], origin[1]), *width, *height, arcs)
            }
            Shape::Regular { sides, radius } => PolygonSpec::regular(*sides, *radius, arcs),
            Shape::Polygon { vertices } => {
                PolygonSpec::new(vertices.iter().map(|v| Point2::new(v[0], v[1])).collect(), arcs)
            }
        }
    }

    /// Mesh and the capacity scale that was applied to it.
    pub fn mesh(&self) -> Result<(Mesh2D, f64)> {
        let mesh = build_mesh(&self.polygon()?, self.h)?;
        Ok(rescale_for_capacity(&mesh))
    }
}

/// Obstacles as fields; a missing side is unbounded.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ObstacleConfig {
    pub lower: Option<ScalarField>,
    pub upper: Option<ScalarField>,
}

impl ObstacleConfig {
    pub fn nodal(&self, mesh: &Mesh2D) -> Result<BoxConstraint> {
        let eval = |f: &Option<ScalarField>, inf: f64| {
            DVector::from_iterator(
                mesh.n_nodes(),
                mesh.nodes.iter().map(|p| f.as_ref().map_or(inf, |f| f.eval(*p))),
            )
        };
        BoxConstraint::new(eval(&self.lower, f64::NEG_INFINITY), eval(&self.upper, f64::INFINITY))
    }
}

/// Everything needed to assemble one problem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemConfig {
    pub geometry: GeometryConfig,
    /// Coefficient `p` of the interior flux.
    pub nonlinearity: NonlinearityP,
    /// Superpotential parameters; absent means `J ≡ 0`.
    pub friction: Option<FrictionLaw>,
    /// Volume load.
    #[serde(default)]
    pub f: ScalarField,
    /// Interface load.
    #[serde(default)]
    pub q: ScalarField,
    pub obstacle: Option<ObstacleConfig>,
}

/// An assembled problem with the capacity scale used for its mesh.
#[derive(Debug, Clone)]
pub struct BuiltProblem {
    pub problem: HviProblem,
    pub scale: f64,
}

impl ProblemConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.geometry.h > 0.0) {
            return Err(Error::InvalidParameter(format!("h must be positive, got {}", self.geometry.h)));
        }
        self.geometry.polygon()?;
        self.nonlinearity.validate()?;
        if let Some(l) = &self.friction {
            FrictionLaw::new(l.mu1, l.mu2, l.alpha)?;
        }
        if !self.f.is_finite() || !self.q.is_finite() {
            return Err(Error::InvalidParameter("data fields must be finite with positive bump widths".into()));
        }
        Ok(())
    }

    pub fn with_h(&self, h: f64) -> Self {
        let mut c = self.clone();
        c.geometry.h = h;
        c
    }

    pub fn system(&self) -> Result<(Arc<CoupledSystem>, f64)> {
        self.validate()?;
        let (mesh, scale) = self.geometry.mesh()?;
        let sys = CoupledSystem::new(mesh, self.nonlinearity, self.friction)?;
        Ok((Arc::new(sys), scale))
    }

    /// Data and constraints of this configuration on an existing system.
    pub fn problem_on(&self, system: Arc<CoupledSystem>) -> Result<HviProblem> {
        let lambda = system.lambda(&self.f, &self.q)?;
        let extended = match &self.obstacle {
            Some(o) => ExtendedF::with_bounds(o.nodal(&system.mesh)?),
            None => ExtendedF::none(),
        };
        HviProblem::new(system, lambda, extended)
    }

    pub fn build(&self) -> Result<BuiltProblem> {
        let (sys, scale) = self.system()?;
        Ok(BuiltProblem {
            problem: self.problem_on(sys)?,
            scale,
        })
    }
}

pub const CANONICAL_SIDE: f64 = 0.6;

/// Square of side 0.6 with contact on the bottom side, rational `p` with
/// `(a, b) = (2, 1)`, friction law `(μ₁, μ₂, α) = (2, 1, 1)` and a boundary
/// load concentrated at the middle of the contact side.
pub fn canonical_nonmonotone(h: f64) -> ProblemConfig {
    ProblemConfig {
        geometry: GeometryConfig {
            shape: Shape::Square { side: CANONICAL_SIDE },
            gamma_s_arcs: vec![[0, 1]],
            h,
        },
        nonlinearity: NonlinearityP::Rational { a: 2.0, b: 1.0 },
        friction: Some(FrictionLaw {
            mu1: 2.0,
            mu2: 1.0,
            alpha: 1.0,
        }),
        f: ScalarField::affine(1.0, 0.5, 0.0),
        q: ScalarField::zero().with_bump(6.0, [0.0, -0.3], 0.15),
        obstacle: None,
    }
}

pub fn square_linear_smooth(h: f64) -> ProblemConfig {
    ProblemConfig {
        nonlinearity: NonlinearityP::Linear { p: 1.0 },
        friction: None,
        ..canonical_nonmonotone(h)
    }
}

pub fn square_nonlinear_smooth(h: f64) -> ProblemConfig {
    ProblemConfig {
        friction: None,
        ..canonical_nonmonotone(h)
    }
}

/// Canonical fixture with obstacles `0.12 - 0.15 x ≤ u ≤ 0.32 - 0.5 y`.
pub fn square_nonmonotone_obstacle(h: f64) -> ProblemConfig {
    ProblemConfig {
        obstacle: Some(ObstacleConfig {
            lower: Some(ScalarField::affine(0.12, -0.15, 0.0)),
            upper: Some(ScalarField::affine(0.32, 0.0, -0.5)),
        }),
        ..canonical_nonmonotone(h)
    }
}

/// Regular 16-gon of radius 0.4 with contact on its lower half.
pub fn circle_nonmonotone(h: f64) -> ProblemConfig {
    ProblemConfig {
        geometry: GeometryConfig {
            shape: Shape::Regular { sides: 16, radius: 0.4 },
            gamma_s_arcs: vec![[8, 0]],
            h,
        },
        q: ScalarField::zero().with_bump(6.0, [0.0, -0.4], 0.2),
        ..canonical_nonmonotone(h)
    }
}

/// Square of side 0.6 meshed with two triangles; contact on two sides gives a
/// single jump unknown (five unknowns in total).
pub fn tiny_nonmonotone() -> ProblemConfig {
    ProblemConfig {
        geometry: GeometryConfig {
            shape: Shape::Square { side: CANONICAL_SIDE },
            gamma_s_arcs: vec![[0, 2]],
            h: 1.0,
        },
        f: ScalarField::affine(1.0, 0.5, 0.0),
        q: ScalarField::affine(-1.0, 2.0, 4.0),
        ..canonical_nonmonotone(1.0)
    }
}

/// Two-triangle square with contact on the sides `[0, arc_end)`.
pub fn tiny(arc_end: usize) -> ProblemConfig {
    ProblemConfig {
        geometry: GeometryConfig {
            gamma_s_arcs: vec![[0, arc_end]],
            ..tiny_nonmonotone().geometry
        },
        ..tiny_nonmonotone()
    }
}

/// Every shipped problem with at most six unknowns.
pub fn tiny_fixtures() -> Vec<(&'static str, ProblemConfig)> {
    vec![
        ("tiny-nonmonotone", tiny_nonmonotone()),
        ("tiny-two-contact-nodes", tiny(3)),
        (
            "tiny-sticking",
            ProblemConfig {
                q: ScalarField::constant(0.2),
                ..tiny_nonmonotone()
            },
        ),
        (
            "tiny-obstacle",
            ProblemConfig {
                obstacle: Some(ObstacleConfig {
                    lower: Some(ScalarField::constant(-0.5)),
                    upper: Some(ScalarField::affine(0.05, 0.1, 0.0)),
                }),
                ..tiny_nonmonotone()
            },
        ),
        (
            "tiny-pinned",
            ProblemConfig {
                obstacle: Some(ObstacleConfig {
                    lower: Some(ScalarField::zero()),
                    upper: Some(ScalarField::zero()),
                }),
                ..tiny_nonmonotone()
            },
        ),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequenceChoice {
    Linear,
    Obstacle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StabilityConfig {
    pub sequence: SequenceChoice,
    /// Number of members `F_1, ..., F_N`.
    pub n: usize,
    pub decay: Decay,
    /// Amplitude of the random load perturbation (linear sequences).
    pub perturbation_amplitude: f64,
    /// Obstacles are widened by `decay(n)` times this offset on each side.
    pub obstacle_offset: f64,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        StabilityConfig {
            sequence: SequenceChoice::Linear,
            n: 8,
            decay: Decay::Geometric { ratio: 0.1 },
            perturbation_amplitude: 1.0,
            obstacle_offset: 1.0,
        }
    }
}

impl StabilityConfig {
    /// The Mosco sequence for `base`; `seed` drives the random perturbation.
    pub fn sequence(&self, base: &HviProblem, seed: u64) -> Result<MoscoSequence> {
        match self.sequence {
            SequenceChoice::Linear => {
                let extent = 0.5 * base.system.mesh.diameter();
                let (f, q) = random_perturbation(seed, self.perturbation_amplitude, extent);
                make_linear_sequence(&base.system, &f, &q, self.decay)
            }
            SequenceChoice::Obstacle => {
                let b = base.extended.bounds.as_ref().ok_or_else(|| {
                    Error::InvalidParameter("an obstacle sequence needs a problem with obstacles".into())
                })?;
                let off = DVector::from_element(b.len(), self.obstacle_offset);
                make_obstacle_sequence(b.lower.clone(), b.upper.clone(), off.clone(), off, self.decay)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("stability sequence length must be positive".into()));
        }
        if !(self.perturbation_amplitude.is_finite() && self.obstacle_offset >= 0.0 && self.obstacle_offset.is_finite()) {
            return Err(Error::InvalidParameter("perturbation sizes must be finite and nonnegative".into()));
        }
        if let Decay::Geometric { ratio } = self.decay {
            if !(0.0..1.0).contains(&ratio) {
                return Err(Error::InvalidParameter(format!("geometric decay ratio must lie in [0, 1), got {ratio}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ControlConfig {
    #[serde(rename = "control")]
    pub kind: ControlKind,
    /// Tikhonov weight `ρ`.
    pub rho: f64,
    pub grid: ControlGrid,
    /// Control that manufactures the target state.
    pub true_control: Vec<f64>,
    /// Initial control; zero when absent.
    pub start: Option<Vec<f64>>,
    /// Additional minimizations from random starts around the initial control.
    pub restarts: usize,
    pub restart_radius: f64,
    /// Values of `ρ` for a recovery study; empty to skip it.
    pub rho_sweep: Vec<f64>,
    pub optimizer: OptimizerOptions,
}

impl Default for ControlConfig {
    fn default() -> Self {
        ControlConfig {
            kind: ControlKind::Distributed,
            rho: 1e-8,
            grid: ControlGrid::default(),
            true_control: ocp1_true_control(),
            start: None,
            restarts: 0,
            restart_radius: 1.0,
            rho_sweep: vec![],
            optimizer: OptimizerOptions::default(),
        }
    }
}

impl ControlConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho.is_finite()) || self.rho_sweep.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(Error::InvalidParameter("rho must be positive".into()));
        }
        if !(self.restart_radius >= 0.0 && self.restart_radius.is_finite()) {
            return Err(Error::InvalidParameter("restart radius must be finite and nonnegative".into()));
        }
        Ok(())
    }

    /// Inverse-crime control problem on `system`; data that is not controlled
    /// comes from `problem`.
    pub fn setup(
        &self,
        problem: &ProblemConfig,
        system: Arc<CoupledSystem>,
        solver: &SolverOptions,
    ) -> Result<ControlProblem> {
        let fixed_extended = match (&problem.obstacle, self.kind) {
            (Some(o), k) if k != ControlKind::Obstacle => ExtendedF::with_bounds(o.nodal(&system.mesh)?),
            _ => ExtendedF::none(),
        };
        let space_dim = ControlSpace::new(&system, self.kind, self.grid)?.dim();
        if self.true_control.len() != space_dim {
            return Err(Error::DimensionMismatch {
                what: "true control",
                expected: space_dim,
                got: self.true_control.len(),
            });
        }
        if let Some(s) = &self.start {
            if s.len() != space_dim {
                return Err(Error::DimensionMismatch {
                    what: "initial control",
                    expected: space_dim,
                    got: s.len(),
                });
            }
        }
        inverse_crime_setup(
            system,
            self.kind,
            self.grid,
            &problem.f,
            &problem.q,
            fixed_extended,
            &DVector::from_vec(self.true_control.clone()),
            self.rho,
            solver,
        )
    }

    pub fn start_vector(&self, dim: usize) -> DVector<f64> {
        self.start.as_ref().map_or_else(|| DVector::zeros(dim), |s| DVector::from_vec(s.clone()))
    }
}

pub fn ocp1_true_control() -> Vec<f64> {
    (0..16).map(|i| 1.0 + 0.2 * ((i * 37) % 7) as f64 - 0.6).collect()
}

pub fn ocp2_true_control() -> Vec<f64> {
    (0..8).map(|i| 2.0 + 0.2 * (((i + 3) * 37) % 7) as f64 - 0.6).collect()
}

pub fn ocp3_true_control() -> Vec<f64> {
    ocp1_true_control().into_iter().chain(ocp2_true_control()).collect()
}

/// Zero lower obstacle and a tilted upper obstacle on the 2x2 grid.
pub fn ocp4_true_control() -> Vec<f64> {
    vec![0.0, 0.0, 0.0, 0.0, 0.30, 0.34, 0.22, 0.26]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FieldConfig {
    /// Evaluation grid; points inside Ω or too close to Γ are skipped.
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub n: [usize; 2],
    /// Exclusion distance from Γ; the mesh size when absent.
    pub min_distance: Option<f64>,
    /// Spacing of the five-point harmonicity check.
    pub harmonicity_delta: f64,
    /// Harmonicity probes sit on a circle of radius `ring_factor · diam`.
    pub ring_factor: f64,
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig {
            x: [-1.0, 1.0],
            y: [-1.0, 1.0],
            n: [41, 41],
            min_distance: None,
            harmonicity_delta: 0.01,
            ring_factor: 1.0,
        }
    }
}

impl FieldConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n[0] < 2 || self.n[1] < 2 || !(self.x[0] < self.x[1]) || !(self.y[0] < self.y[1]) {
            return Err(Error::InvalidParameter("field grid needs increasing ranges and at least 2x2 points".into()));
        }
        if !(self.harmonicity_delta > 0.0 && self.ring_factor > 0.5) {
            return Err(Error::InvalidParameter(
                "harmonicity spacing must be positive and the probe ring must lie outside the domain".into(),
            ));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<Point2<f64>> {
        let [nx, ny] = self.n;
        let mut pts = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                pts.push(Point2::new(
                    self.x[0] + (self.x[1] - self.x[0]) * i as f64 / (nx - 1) as f64,
                    self.y[0] + (self.y[1] - self.y[0]) * j as f64 / (ny - 1) as f64,
                ));
            }
        }
        pts
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpectraConfig {
    pub radius: f64,
    pub panels: Vec<usize>,
    pub modes: Vec<usize>,
}

impl Default for SpectraConfig {
    fn default() -> Self {
        SpectraConfig {
            radius: 0.25,
            panels: vec![32, 64, 128, 256],
            modes: vec![1, 2, 3, 4],
        }
    }
}

impl SpectraConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "circle radius must lie in (0, 0.5) for a positive single layer, got {}",
                self.radius
            )));
        }
        if self.panels.iter().any(|&n| n < 3) || self.modes.contains(&0) {
            return Err(Error::InvalidParameter("need at least 3 panels and modes >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    Solve,
    Stability(StabilityConfig),
    Control(ControlConfig),
    Field(FieldConfig),
    Spectra(SpectraConfig),
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Solve => "solve",
            Experiment::Stability(_) => "stability",
            Experiment::Control(_) => "control",
            Experiment::Field(_) => "field",
            Experiment::Spectra(_) => "spectra",
        }
    }

    /// Default options for an experiment name.
    pub fn default_for(name: &str) -> Option<Experiment> {
        Some(match name {
            "solve" => Experiment::Solve,
            "stability" => Experiment::Stability(StabilityConfig::default()),
            "control" => Experiment::Control(ControlConfig::default()),
            "field" => Experiment::Field(FieldConfig::default()),
            "spectra" => Experiment::Spectra(SpectraConfig::default()),
            _ => return None,
        })
    }
}

/// A problem, solver settings and an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// Not needed by the spectral study.
    pub problem: Option<ProblemConfig>,
    #[serde(default)]
    pub solver: SolverOptions,
    /// Seeds random perturbations, restarts and residual directions.
    #[serde(default)]
    pub seed: u64,
    pub experiment: Experiment,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let s = &self.solver;
        if !(s.outer_tol > 0.0 && s.inner_tol > 0.0 && s.max_outer > 0) {
            return Err(Error::InvalidParameter("solver tolerances and iteration cap must be positive".into()));
        }
        match (&self.problem, &self.experiment) {
            (None, Experiment::Spectra(_)) => {}
            (None, e) => {
                return Err(Error::InvalidParameter(format!("experiment '{}' needs a [problem] section", e.name())));
            }
            (Some(p), _) => p.validate()?,
        }
        match &self.experiment {
            Experiment::Solve => Ok(()),
            Experiment::Stability(c) => {
                if c.sequence == SequenceChoice::Obstacle && self.problem.as_ref().is_some_and(|p| p.obstacle.is_none()) {
                    return Err(Error::InvalidParameter("an obstacle sequence needs a problem with obstacles".into()));
                }
                c.validate()
            }
            Experiment::Control(c) => c.validate(),
            Experiment::Field(c) => c.validate(),
            Experiment::Spectra(c) => c.validate(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FixtureInfo {
    pub name: &'static str,
    pub description: &'static str,
}

pub const FIXTURES: &[FixtureInfo] = &[
    FixtureInfo {
        name: "circle-spectral",
        description: "circle R=0.25: discrete exterior Steklov eigenvalues against n/R",
    },
    FixtureInfo {
        name: "square-linear-smooth",
        description: "square, p = 1, no friction",
    },
    FixtureInfo {
        name: "square-nonlinear-smooth",
        description: "square, rational p (2, 1), no friction",
    },
    FixtureInfo {
        name: "square-nonmonotone",
        description: "canonical fixture: square, rational p (2, 1), friction law (2, 1, 1)",
    },
    FixtureInfo {
        name: "square-nonmonotone-obstacle",
        description: "canonical fixture with lower and upper obstacles",
    },
    FixtureInfo {
        name: "circle-nonmonotone",
        description: "16-gon of radius 0.4, contact on the lower half, friction law (2, 1, 1)",
    },
    FixtureInfo {
        name: "tiny-nonmonotone",
        description: "two-triangle square with five unknowns, checkable by brute force",
    },
    FixtureInfo {
        name: "ocp1-inverse-crime",
        description: "distributed control on 4x4 patches, target from a known control",
    },
    FixtureInfo {
        name: "ocp2-inverse-crime",
        description: "boundary control on 8 segments, target from a known control, 20 restarts",
    },
    FixtureInfo {
        name: "ocp3-inverse-crime",
        description: "distributed and boundary control, target from a known control",
    },
    FixtureInfo {
        name: "ocp4-obstacle",
        description: "bilinear obstacle pair control, target from a known obstacle pair",
    },
    FixtureInfo {
        name: "stability-linear",
        description: "canonical fixture under geometrically decaying load perturbations, N = 8",
    },
    FixtureInfo {
        name: "stability-obstacle",
        description: "obstacle fixture under geometrically tightening obstacles, N = 8",
    },
];

/// Mesh size of the shipped solve and stability fixtures.
pub const FIXTURE_H: f64 = 0.08;
/// Mesh size of the shipped control fixtures.
pub const CONTROL_H: f64 = 0.15;

pub fn fixture(name: &str) -> Option<Scenario> {
    let solve = |problem: ProblemConfig| Scenario {
        problem: Some(problem),
        solver: SolverOptions::default(),
        seed: 0,
        experiment: Experiment::Solve,
    };
    let control = |kind: ControlKind, true_control: Vec<f64>, restarts: usize| Scenario {
        problem: Some(canonical_nonmonotone(CONTROL_H)),
        solver: SolverOptions::default(),
        seed: 0,
        experiment: Experiment::Control(ControlConfig {
            kind,
            true_control,
            restarts,
            ..ControlConfig::default()
        }),
    };
    Some(match name {
        "circle-spectral" => Scenario {
            problem: None,
            solver: SolverOptions::default(),
            seed: 0,
            experiment: Experiment::Spectra(SpectraConfig::default()),
        },
        "square-linear-smooth" => solve(square_linear_smooth(FIXTURE_H)),
        "square-nonlinear-smooth" => solve(square_nonlinear_smooth(FIXTURE_H)),
        "square-nonmonotone" => solve(canonical_nonmonotone(FIXTURE_H)),
        "square-nonmonotone-obstacle" => solve(square_nonmonotone_obstacle(FIXTURE_H)),
        "circle-nonmonotone" => solve(circle_nonmonotone(FIXTURE_H)),
        "tiny-nonmonotone" => solve(tiny_nonmonotone()),
        "ocp1-inverse-crime" => control(ControlKind::Distributed, ocp1_true_control(), 0),
        "ocp2-inverse-crime" => control(ControlKind::Boundary, ocp2_true_control(), 20),
        "ocp3-inverse-crime" => control(ControlKind::DistributedBoundary, ocp3_true_control(), 0),
        "ocp4-obstacle" => control(ControlKind::Obstacle, ocp4_true_control(), 0),
        "stability-linear" | "stability-obstacle" => {
            let linear = name == "stability-linear";
            Scenario {
                problem: Some(if linear {
                    canonical_nonmonotone(FIXTURE_H)
                } else {
                    square_nonmonotone_obstacle(FIXTURE_H)
                }),
                solver: SolverOptions {
                    outer_tol: 1e-12,
                    ..SolverOptions::default()
                },
                seed: 7,
                experiment: Experiment::Stability(StabilityConfig {
                    sequence: if linear { SequenceChoice::Linear } else { SequenceChoice::Obstacle },
                    ..StabilityConfig::default()
                }),
            }
        }
        _ => return None,
    })
}
