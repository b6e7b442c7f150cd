use hemivar::geometry::{build_mesh, rescale_for_capacity, BoundaryPart, DofMaps, Mesh2D, PolygonSpec};
use hemivar::Error;
use nalgebra::{DVector, Point2};
use proptest::prelude::*;

fn l_shape() -> PolygonSpec {
    let v = [(0.0, 0.0), (0.6, 0.0), (0.6, 0.3), (0.3, 0.3), (0.3, 0.6), (0.0, 0.6)];
    PolygonSpec::new(v.iter().map(|&(x, y)| Point2::new(x, y)).collect(), vec![(0, 2)]).unwrap()
}

fn check_mesh(spec: &PolygonSpec, mesh: &Mesh2D, h: f64) {
    assert!(mesh.h <= h * (1.0 + 1e-12), "h {} > {h}", mesh.h);
    assert!((mesh.area() - spec.signed_area()).abs() <= 1e-10 * spec.signed_area());
    for k in 0..mesh.triangles.len() {
        assert!(mesh.triangle_area(k) > 0.0);
    }
    let s_len = mesh.perimeter_of(BoundaryPart::S);
    let t_len = mesh.perimeter_of(BoundaryPart::T);
    assert!((s_len + t_len - spec.perimeter()).abs() <= 1e-10 * spec.perimeter());
    let labels = spec.edge_labels();
    let n = spec.n_vertices();
    let s_exact: f64 = (0..n)
        .filter(|&i| labels[i] == BoundaryPart::S)
        .map(|i| (spec.vertices[(i + 1) % n] - spec.vertices[i]).norm())
        .sum();
    assert!((s_len - s_exact).abs() <= 1e-10 * spec.perimeter());
}

#[test]
fn square_l_shape_and_polygon_meshes() {
    let square = PolygonSpec::centered_square(0.6).unwrap();
    for h in [0.3, 0.1, 0.05] {
        check_mesh(&square, &build_mesh(&square, h).unwrap(), h);
    }
    let l = l_shape();
    check_mesh(&l, &build_mesh(&l, 0.07).unwrap(), 0.07);
    let hex = PolygonSpec::regular(6, 0.4, vec![(3, 5)]).unwrap();
    check_mesh(&hex, &build_mesh(&hex, 0.1).unwrap(), 0.1);
}

#[test]
fn boundary_nodes_come_first_counterclockwise() {
    let spec = PolygonSpec::centered_square(0.6).unwrap();
    let mesh = build_mesh(&spec, 0.1).unwrap();
    let dofs = DofMaps::new(&mesh).unwrap();
    let nb = dofs.n_boundary();
    let mut sorted = dofs.boundary_dofs.clone();
    sorted.sort_unstable();
    assert_eq!(sorted, (0..nb).collect::<Vec<_>>());
    // Shoelace over the traversal recovers the polygon area with its sign.
    let area: f64 = (0..nb)
        .map(|k| {
            let a = mesh.nodes[dofs.boundary_dofs[k]];
            let b = mesh.nodes[dofs.boundary_dofs[(k + 1) % nb]];
            0.5 * (a.x * b.y - b.x * a.y)
        })
        .sum();
    assert!((area - 0.36).abs() < 1e-12);
}

#[test]
fn junction_nodes_are_pinned() {
    let spec = PolygonSpec::centered_square(0.6).unwrap();
    let mesh = build_mesh(&spec, 0.1).unwrap();
    let dofs = DofMaps::new(&mesh).unwrap();
    // Bottom side from (-0.3,-0.3) to (0.3,-0.3): only its interior nodes carry jumps.
    for node in dofs.gamma_s_nodes() {
        let p = mesh.nodes[node];
        assert!((p.y + 0.3).abs() < 1e-12 && p.x.abs() < 0.3 - 1e-12, "{p:?}");
    }
    let corners = [Point2::new(-0.3, -0.3), Point2::new(0.3, -0.3)];
    for c in corners {
        let node = mesh.nodes.iter().position(|p| (p - c).norm() < 1e-12).unwrap();
        let k = dofs.trace_map[node].unwrap();
        assert!(!dofs.gamma_s_dofs.contains(&k));
    }
    let w = dofs.gamma_s_weights(&mesh);
    // Trapezoidal weights of the interior nodes miss half a panel at each end.
    let panel = 0.6 / (dofs.n_gamma_s() + 1) as f64;
    assert!((w.sum() - (0.6 - panel)).abs() < 1e-12);
}

#[test]
fn trace_maps_are_adjoint() {
    let spec = l_shape();
    let mesh = build_mesh(&spec, 0.1).unwrap();
    let dofs = DofMaps::new(&mesh).unwrap();
    let u = DVector::from_fn(mesh.n_nodes(), |i, _| (i as f64 * 0.37).sin());
    let b = DVector::from_fn(dofs.n_boundary(), |i, _| (i as f64 * 1.3).cos());
    assert!((dofs.trace(&u).dot(&b) - u.dot(&dofs.trace_adjoint(&b))).abs() < 1e-12);
    let v = DVector::from_fn(dofs.n_gamma_s(), |i, _| i as f64 - 1.5);
    assert!((dofs.expand_gamma_s(&v).dot(&b) - v.dot(&dofs.restrict_gamma_s(&b))).abs() < 1e-12);
}

#[test]
fn text_format_round_trip() {
    let mesh = build_mesh(&l_shape(), 0.1).unwrap();
    let back = Mesh2D::from_text(&mesh.to_text()).unwrap();
    assert_eq!(back.nodes, mesh.nodes);
    assert_eq!(back.triangles, mesh.triangles);
    assert_eq!(back.boundary_edges, mesh.boundary_edges);
    assert!(matches!(Mesh2D::from_text("nodes 1 triangles"), Err(Error::Parse(_))));
    assert!(matches!(
        Mesh2D::from_text("nodes 3 triangles 1 bedges 3\n0 0\n1 0\n0 1\n0 1 2\n0 1 S\n1 2 X\n2 0 T\n"),
        Err(Error::Parse(_))
    ));
}

#[test]
fn invalid_inputs_are_rejected() {
    let bowtie = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 1.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)];
    assert!(matches!(PolygonSpec::new(bowtie, vec![(0, 1)]), Err(Error::InvalidPolygon(_))));
    let sq = |arcs| PolygonSpec::rectangle(Point2::origin(), 1.0, 1.0, arcs);
    assert!(matches!(sq(vec![]), Err(Error::InvalidPolygon(_))));
    assert!(matches!(sq(vec![(0, 2), (1, 3)]), Err(Error::InvalidPolygon(_))));
    assert!(matches!(sq(vec![(0, 2), (2, 0)]), Err(Error::InvalidPolygon(_))));
    let spec = sq(vec![(0, 1)]).unwrap();
    assert!(build_mesh(&spec, 0.0).is_err());
    // One side of a two-triangle mesh has no interior node.
    let coarse = build_mesh(&spec, 2.0).unwrap();
    assert!(matches!(DofMaps::new(&coarse), Err(Error::GammaSUnresolved)));
}

#[test]
fn capacity_rescaling() {
    let big = PolygonSpec::centered_square(3.0).unwrap();
    let mesh = build_mesh(&big, 0.5).unwrap();
    let (scaled, s) = rescale_for_capacity(&mesh);
    assert!(scaled.diameter() < 1.0 && s < 1.0);
    assert!((scaled.area() - s * s * mesh.area()).abs() < 1e-12);
    let small = build_mesh(&PolygonSpec::centered_square(0.6).unwrap(), 0.2).unwrap();
    assert_eq!(rescale_for_capacity(&small).1, 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_rectangles_mesh_conformingly(w in 0.2f64..1.5, ht in 0.2f64..1.5, h in 0.08f64..0.3, side in 0usize..4) {
        let spec = PolygonSpec::rectangle(Point2::new(-0.1, 0.2), w, ht, vec![(side, (side + 1) % 4)]).unwrap();
        let mesh = build_mesh(&spec, h).unwrap();
        check_mesh(&spec, &mesh, h);
        let dofs = DofMaps::new(&mesh).unwrap();
        prop_assert_eq!(dofs.n_boundary(), mesh.boundary_edges.len());
        // Euler characteristic of a disc.
        let edges = (3 * mesh.triangles.len() + mesh.boundary_edges.len()) / 2;
        prop_assert_eq!(mesh.n_nodes() as i64 - edges as i64 + mesh.triangles.len() as i64, 1);
    }

    #[test]
    fn random_regular_polygons(n in 5usize..12, r in 0.2f64..0.6, h in 0.06f64..0.2) {
        let spec = PolygonSpec::regular(n, r, vec![(0, n / 2)]).unwrap();
        let mesh = build_mesh(&spec, h).unwrap();
        check_mesh(&spec, &mesh, h);
        for p in &mesh.nodes {
            prop_assert!(spec.contains(p) || spec.distance_to_boundary(p) < 1e-12);
        }
    }
}
