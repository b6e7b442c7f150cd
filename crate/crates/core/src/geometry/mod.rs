//! Polygonal domains, their triangulation and the P1 index maps.

mod dofs;
mod mesh;
mod mesher;
mod polygon;

pub use dofs::DofMaps;
pub use mesh::{BoundaryEdge, Mesh2D};
pub use polygon::{BoundaryPart, PolygonSpec};
pub(crate) use polygon::segment_distance;

use crate::error::{Error, Result};

/// Diameter the capacity rescaling maps oversized meshes to.
pub const CAPACITY_TARGET_DIAMETER: f64 = 0.9;

/// Triangulates `spec` so that every element has diameter at most `h_target`.
///
/// Boundary nodes come first in the node list, counterclockwise from vertex 0.
pub fn build_mesh(spec: &PolygonSpec, h_target: f64) -> Result<Mesh2D> {
    if !(h_target > 0.0) || !h_target.is_finite() {
        return Err(Error::InvalidParameter(format!("h_target must be positive, got {h_target}")));
    }
    let mut spacing = h_target;
    for _ in 0..40 {
        let raw = mesher::triangulate(spec, spacing)?;
        let edges = raw
            .segments
            .iter()
            .map(|&(a, b, part)| BoundaryEdge { a, b, part })
            .collect();
        let mesh = Mesh2D::new(raw.nodes, raw.triangles, edges)?;
        if mesh.h <= h_target * (1.0 + 1e-12) {
            return Ok(mesh);
        }
        spacing *= 0.9 * h_target / mesh.h;
    }
    Err(Error::Meshing(format!("could not reach element diameter {h_target}")))
}

/// Scales the mesh about the origin so that its diameter is below one.
///
/// Meshes that already satisfy the bound are returned unchanged with scale 1.
pub fn rescale_for_capacity(mesh: &Mesh2D) -> (Mesh2D, f64) {
    let d = mesh.diameter();
    if d < 1.0 {
        (mesh.clone(), 1.0)
    } else {
        let s = CAPACITY_TARGET_DIAMETER / d;
        (mesh.scaled(s), s)
    }
}
