use std::f64::consts::PI;

use hemivar::bem::BoundaryMesh;
use hemivar::exterior::{
    evaluate_exterior, far_circle_constant, harmonicity_defect, probe_ring, radiation_profile, reconstruct_u2,
    transmission_residuals, CauchyData,
};
use hemivar::hvi::{solve, SolverOptions};
use hemivar::scenario::canonical_nonmonotone;
use hemivar::Error;
use nalgebra::{DVector, Point2};

const R: f64 = 0.5;

fn dipole(n: usize) -> (BoundaryMesh, CauchyData) {
    let b = BoundaryMesh::circle(R, n).unwrap();
    let g = DVector::from_iterator(n, b.nodes.iter().map(|p| p.y.atan2(p.x).cos()));
    let psi = DVector::from_iterator(
        n,
        b.panels.iter().map(|p| {
            let m = p.point(0.5);
            -m.y.atan2(m.x).cos() / R
        }),
    );
    let data = CauchyData::new(&b, g, psi, 0.0).unwrap();
    (b, data)
}

#[test]
fn circle_dipole_matches_closed_form() {
    let (b, data) = dipole(256);
    assert!(data.log_coefficient.abs() < 1e-12);
    let pts: Vec<Point2<f64>> = (0..12)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / 12.0 + 0.1;
            Point2::new(2.0 * R * t.cos(), 2.0 * R * t.sin())
        })
        .collect();
    let u = evaluate_exterior(&b, &data, &pts, 0.0).unwrap();
    for (p, u) in pts.iter().zip(&u) {
        let exact = 0.5 * p.y.atan2(p.x).cos();
        assert!((u - exact).abs() <= 0.01, "{p}: {u} vs {exact}");
    }
    assert!(far_circle_constant(&b, &data, 10.0, 128).abs() < 1e-3);
}

#[test]
fn constant_field_is_the_radiation_constant() {
    let b = BoundaryMesh::circle(R, 32).unwrap();
    let data = CauchyData::new(&b, DVector::zeros(32), DVector::zeros(32), 3.0).unwrap();
    let u = evaluate_exterior(&b, &data, &[Point2::new(1.0, 0.3), Point2::new(-4.0, 2.0)], 0.0).unwrap();
    assert!(u.iter().all(|&v| v == 3.0));
    assert_eq!(data.scale(), 3.0);
}

#[test]
fn points_inside_or_too_close_are_rejected() {
    let (b, data) = dipole(64);
    assert!(matches!(
        evaluate_exterior(&b, &data, &[Point2::new(0.1, 0.0)], 0.0),
        Err(Error::ExteriorPoint { .. })
    ));
    assert!(matches!(
        evaluate_exterior(&b, &data, &[Point2::new(R + 0.01, 0.0)], 0.05),
        Err(Error::ExteriorPoint { .. })
    ));
}

#[test]
fn mismatched_cauchy_data_is_rejected() {
    let b = BoundaryMesh::circle(R, 16).unwrap();
    assert!(CauchyData::new(&b, DVector::zeros(15), DVector::zeros(16), 0.0).is_err());
}

#[test]
fn reconstructed_field_of_a_coupled_solution() {
    let config = canonical_nonmonotone(0.15);
    let p = config.build().unwrap().problem;
    let opts = SolverOptions {
        outer_tol: 1e-12,
        ..SolverOptions::default()
    };
    let x = solve(&p, &opts).unwrap().x();
    let sys = &p.system;
    let data = reconstruct_u2(&p, &x).unwrap();
    let boundary = &sys.operators.boundary;

    let b_q = sys.boundary_load(|pt| config.q.eval(pt));
    let t = transmission_residuals(&p, &x, &b_q).unwrap();
    assert!(t.dirichlet_jump <= 1e-12 * data.scale().max(1.0));
    assert!(t.neumann_jump.is_finite() && t.inclusion.is_finite());

    let ring = probe_ring(boundary, &data, 1.0, 32);
    let defect = harmonicity_defect(boundary, &data, &ring, 0.01, sys.mesh.h).unwrap();
    assert!(defect <= 1e-3 * data.scale(), "{defect}");

    let d = boundary.diameter();
    let radii: Vec<f64> = (0..4).map(|k| 4.0 * d * 2f64.powi(k)).collect();
    let rem = radiation_profile(boundary, &data, 0.3, &radii).unwrap();
    assert!(rem.windows(2).all(|w| w[1] < w[0]), "{rem:?}");
}
