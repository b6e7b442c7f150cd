use hemivar::bem::{assemble_boundary_operators, assemble_steklov, circle_steklov_oracle, BoundaryMesh};
use hemivar::geometry::{build_mesh, rescale_for_capacity, DofMaps, PolygonSpec};
use hemivar::linalg::generalized_eigen;
use nalgebra::DVector;

fn nodal_cos(b: &BoundaryMesh, n: f64) -> DVector<f64> {
    DVector::from_iterator(b.len(), b.nodes.iter().map(|p| (n * p.y.atan2(p.x)).cos()))
}

#[test]
fn single_layer_rayleigh_quotient_on_circle() {
    let r = 0.25;
    let b = BoundaryMesh::circle(r, 64).unwrap();
    let ops = assemble_boundary_operators(&b).unwrap();
    // P0 density cos θ sampled at panel midpoints.
    let psi = DVector::from_iterator(64, b.panels.iter().map(|p| {
        let m = p.midpoint();
        m.y.atan2(m.x).cos()
    }));
    let mass: f64 = b.panels.iter().zip(psi.iter()).map(|(p, x)| p.len * x * x).sum();
    let rq = psi.dot(&(&ops.v * &psi)) / mass;
    let exact = r / 2.0;
    assert!((rq / exact - 1.0).abs() < 0.02, "rq = {rq}, exact = {exact}");
}

#[test]
fn circle_steklov_modes_match_oracle() {
    let r = 0.25;
    let b = BoundaryMesh::circle(r, 128).unwrap();
    let ops = assemble_boundary_operators(&b).unwrap();
    let st = assemble_steklov(&ops).unwrap();
    assert!(st.asymmetry < 1e-8, "asymmetry {}", st.asymmetry);
    let (vals, _) = generalized_eigen(&st.radiation_corrected(), &ops.mass).unwrap();
    assert!(vals[0].abs() < 1e-8);
    for n in 1..=4usize {
        let exact = circle_steklov_oracle(r, n as i64);
        for v in [vals[2 * n - 1], vals[2 * n]] {
            assert!((v / exact - 1.0).abs() < 0.03, "mode {n}: {v} vs {exact}");
        }
        let x = nodal_cos(&b, n as f64);
        let rq = x.dot(&(&st.s * &x)) / x.dot(&(&ops.mass * &x));
        assert!((rq / exact - 1.0).abs() < 0.03, "mode {n}: rq {rq}");
    }
    // Constants: the equilibrium value -1/(R ln R) per unit length.
    let ones = DVector::from_element(128, 1.0);
    let q = ones.dot(&(&st.s * &ones)) / ones.dot(&(&ops.mass * &ones));
    let exact0 = -1.0 / (r * r.ln());
    assert!((q / exact0 - 1.0).abs() < 0.01, "{q} vs {exact0}");
}

#[test]
fn steklov_positive_after_rescaling() {
    let spec = PolygonSpec::rectangle(nalgebra::Point2::new(0.0, 0.0), 2.8, 2.8, vec![(0, 1)]).unwrap();
    let mesh = build_mesh(&spec, 0.5).unwrap();
    let (scaled, s) = rescale_for_capacity(&mesh);
    assert!(s < 1.0 && scaled.diameter() < 1.0);
    let dofs = DofMaps::new(&scaled).unwrap();
    let b = BoundaryMesh::from_mesh(&scaled, &dofs).unwrap();
    let ops = assemble_boundary_operators(&b).unwrap();
    assert!(nalgebra::SymmetricEigen::new(ops.v.clone()).eigenvalues.min() > 0.0);
    let st = assemble_steklov(&ops).unwrap();
    assert!(st.c_s_discrete > 0.0);
}
