use hemivar::control::{
    cost, minimize, relative_control_error, ControlKind, ControlGrid, ControlProblem, ControlSpace, OptimizerOptions,
};
use hemivar::scenario::{canonical_nonmonotone, ocp2_true_control, ocp4_true_control, ControlConfig, ProblemConfig};
use hemivar::Error;
use nalgebra::DVector;

const H: f64 = 0.3;

fn config(kind: ControlKind, truth: Vec<f64>) -> (ProblemConfig, ControlConfig) {
    let cc = ControlConfig {
        kind,
        true_control: truth,
        ..ControlConfig::default()
    };
    (canonical_nonmonotone(H), cc)
}

fn setup(kind: ControlKind, truth: Vec<f64>) -> (ControlConfig, ControlProblem) {
    let (pc, cc) = config(kind, truth);
    let (sys, _) = pc.system().unwrap();
    let cp = cc.setup(&pc, sys, &cc.optimizer.solver).unwrap();
    (cc, cp)
}

#[test]
fn control_space_dimensions() {
    let (sys, _) = canonical_nonmonotone(H).system().unwrap();
    let grid = ControlGrid::default();
    let dims: Vec<usize> = [
        ControlKind::Distributed,
        ControlKind::Boundary,
        ControlKind::DistributedBoundary,
        ControlKind::Obstacle,
    ]
    .iter()
    .map(|&k| ControlSpace::new(&sys, k, grid).unwrap().dim())
    .collect();
    assert_eq!(dims, vec![16, 8, 24, 8]);
}

#[test]
fn control_norm_is_positive_definite() {
    let (sys, _) = canonical_nonmonotone(H).system().unwrap();
    for kind in [ControlKind::DistributedBoundary, ControlKind::Obstacle] {
        let space = ControlSpace::new(&sys, kind, ControlGrid::default()).unwrap();
        for i in 0..space.dim() {
            let e = DVector::from_fn(space.dim(), |j, _| if i == j { 1.0 } else { 0.0 });
            assert!(space.norm_sq(&e) > 0.0, "{kind:?} basis vector {i}");
        }
    }
}

#[test]
fn projection_makes_obstacle_controls_admissible() {
    let (sys, _) = canonical_nonmonotone(H).system().unwrap();
    let space = ControlSpace::new(&sys, ControlKind::Obstacle, ControlGrid::default()).unwrap();
    let mut c = DVector::from_vec(vec![1.0, -1.0, 0.5, 0.0, 0.0, 0.0, 0.2, 0.1]);
    assert!(!space.is_admissible(&c));
    space.project(&mut c);
    assert!(space.is_admissible(&c));
    assert_eq!(c.as_slice(), &[0.0, -1.0, 0.2, 0.0, 0.0, 0.0, 0.2, 0.1]);
    let (lo, hi) = space.obstacles(&c);
    assert!((0..lo.len()).all(|i| lo[i] <= hi[i] + 1e-14));
}

#[test]
fn degenerate_grids_are_rejected() {
    let (sys, _) = canonical_nonmonotone(H).system().unwrap();
    let grid = ControlGrid {
        obstacle_nodes: [1, 2],
        ..ControlGrid::default()
    };
    assert!(ControlSpace::new(&sys, ControlKind::Obstacle, grid).is_err());
}

#[test]
fn invalid_true_obstacle_is_rejected() {
    let (pc, cc) = config(ControlKind::Obstacle, vec![1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    let (sys, _) = pc.system().unwrap();
    assert!(matches!(cc.setup(&pc, sys, &cc.optimizer.solver), Err(Error::InvalidParameter(_))));
}

#[test]
fn wrong_true_control_length_is_rejected() {
    let (pc, cc) = config(ControlKind::Boundary, vec![1.0; 3]);
    let (sys, _) = pc.system().unwrap();
    assert!(matches!(
        cc.setup(&pc, sys, &cc.optimizer.solver),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn true_control_has_zero_misfit() {
    let truth = ocp4_true_control();
    let (cc, cp) = setup(ControlKind::Obstacle, truth.clone());
    let c = cost(&cp, &DVector::from_vec(truth), &cc.optimizer.solver).unwrap();
    assert!(c.misfit <= 1e-20, "{c:?}");
}

#[test]
fn boundary_control_is_recovered() {
    let truth = ocp2_true_control();
    let (cc, cp) = setup(ControlKind::Boundary, truth.clone());
    let opts = OptimizerOptions {
        max_iterations: 200,
        ..cc.optimizer
    };
    let r = minimize(&cp, &DVector::zeros(cp.dim()), &opts).unwrap();
    assert!(r.cost_trajectory.windows(2).all(|w| w[1] <= w[0]));
    assert!(r.final_cost.total < r.cost_trajectory[0]);
    let err = relative_control_error(&cp.space, &DVector::from_vec(r.control), &DVector::from_vec(truth));
    assert!(err <= 0.1, "relative error {err}");
}
