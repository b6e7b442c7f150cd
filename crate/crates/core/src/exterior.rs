//! Exterior field reconstruction and the transmission residuals.
//!
//! The exterior field is `u₂ = W̃g - Ṽψ + a` with the trace `g = u|_Γ + v`,
//! the exterior normal derivative `ψ` (normal pointing out of Ω) and the
//! double and single layer potentials `W̃`, `Ṽ`. A nonzero total flux `∫ψ`
//! leaves a logarithmic far field `(1/2π)(∫ψ) log|x|`.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{DVector, Point2, Vector2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bem::BoundaryMesh;
use crate::error::{check_len, Error, Result};
use crate::geometry::BoundaryPart;
use crate::hvi::HviProblem;

#[derive(Debug, Clone, PartialEq)]
pub struct CauchyData {
    /// P1 trace on the boundary nodes.
    pub dirichlet: DVector<f64>,
    /// P0 exterior normal derivative per panel.
    pub neumann: DVector<f64>,
    /// Radiation constant.
    pub a: f64,
    /// Coefficient of `log|x - centre|` in the far field.
    pub log_coefficient: f64,
    pub centre: Point2<f64>,
}

impl CauchyData {
    pub fn new(boundary: &BoundaryMesh, dirichlet: DVector<f64>, neumann: DVector<f64>, a: f64) -> Result<Self> {
        check_len("Dirichlet datum", boundary.len(), dirichlet.len())?;
        check_len("Neumann datum", boundary.len(), neumann.len())?;
        let flux: f64 = boundary.panels.iter().zip(neumann.iter()).map(|(p, &n)| p.len * n).sum();
        let n = boundary.nodes.len() as f64;
        let centre = boundary.nodes.iter().fold(Point2::origin(), |c, p| c + p.coords / n);
        Ok(CauchyData {
            dirichlet,
            neumann,
            a,
            log_coefficient: flux / (2.0 * PI),
            centre,
        })
    }

    /// Scale of the field values, `max(max |g|, |a|)`.
    pub fn scale(&self) -> f64 {
        self.dirichlet.amax().max(self.a.abs())
    }
}

fn raw_potential(boundary: &BoundaryMesh, data: &CauchyData, x: &Point2<f64>) -> f64 {
    boundary.double_layer_potential(&data.dirichlet, x) - boundary.single_layer_potential(&data.neumann, x)
}

/// `u₂` at exterior points at distance greater than `min_distance` from `Γ`.
pub fn evaluate_exterior(
    boundary: &BoundaryMesh,
    data: &CauchyData,
    points: &[Point2<f64>],
    min_distance: f64,
) -> Result<Vec<f64>> {
    check_len("Dirichlet datum", boundary.len(), data.dirichlet.len())?;
    check_len("Neumann datum", boundary.len(), data.neumann.len())?;
    for p in points {
        if boundary.encloses(p) {
            return Err(Error::ExteriorPoint {
                x: p.x,
                y: p.y,
                reason: "inside the domain".into(),
            });
        }
        let d = boundary.distance(p);
        if d <= min_distance {
            return Err(Error::ExteriorPoint {
                x: p.x,
                y: p.y,
                reason: format!("distance {d:.3e} to the boundary is within {min_distance:.3e}"),
            });
        }
    }
    Ok(points.par_iter().map(|p| raw_potential(boundary, data, p) + data.a).collect())
}

fn circle_points(centre: Point2<f64>, radius: f64, n: usize) -> Vec<Point2<f64>> {
    (0..n)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n as f64;
            centre + radius * Vector2::new(t.cos(), t.sin())
        })
        .collect()
}

/// Radiation constant: mean of the raw potential over a circle of radius
/// `radius` around the centre, minus the logarithmic part.
pub fn far_circle_constant(boundary: &BoundaryMesh, data: &CauchyData, radius: f64, n: usize) -> f64 {
    let pts = circle_points(data.centre, radius, n);
    let vals: Vec<f64> = pts.par_iter().map(|p| raw_potential(boundary, data, p)).collect();
    let mean = vals.iter().sum::<f64>() / n as f64;
    mean - data.log_coefficient * radius.ln()
}

/// Cauchy data of the exterior field belonging to a coupled solution `x`.
pub fn reconstruct_u2(problem: &HviProblem, x: &DVector<f64>) -> Result<CauchyData> {
    let sys = &problem.system;
    check_len("solution", sys.n(), x.len())?;
    let boundary = &sys.operators.boundary;
    let g = sys.total_trace(x);
    let psi = sys.steklov.neumann_density(&g)?;
    let mut data = CauchyData::new(boundary, g, psi, 0.0)?;
    data.a = far_circle_constant(boundary, &data, 10.0 * boundary.diameter().max(1e-300), 128);
    Ok(data)
}

/// Largest five-point Laplacian `|Δ_δ u₂|` over the given points.
pub fn harmonicity_defect(
    boundary: &BoundaryMesh,
    data: &CauchyData,
    points: &[Point2<f64>],
    delta: f64,
    min_distance: f64,
) -> Result<f64> {
    let mut stencil = Vec::with_capacity(5 * points.len());
    for p in points {
        stencil.push(*p);
        for d in [Vector2::new(delta, 0.0), Vector2::new(-delta, 0.0), Vector2::new(0.0, delta), Vector2::new(0.0, -delta)] {
            stencil.push(p + d);
        }
    }
    let vals = evaluate_exterior(boundary, data, &stencil, min_distance)?;
    Ok(vals
        .chunks(5)
        .map(|c| ((c[1] + c[2] + c[3] + c[4] - 4.0 * c[0]) / (delta * delta)).abs())
        .fold(0.0, f64::max))
}

/// Ring of `n` points at distance `factor · diam` from the centre.
pub fn probe_ring(boundary: &BoundaryMesh, data: &CauchyData, factor: f64, n: usize) -> Vec<Point2<f64>> {
    circle_points(data.centre, factor * boundary.diameter(), n)
}

/// `|u₂ - a - c log|x - centre||` along the ray from the centre in direction
/// `angle`, at the given radii.
pub fn radiation_profile(boundary: &BoundaryMesh, data: &CauchyData, angle: f64, radii: &[f64]) -> Result<Vec<f64>> {
    let dir = Vector2::new(angle.cos(), angle.sin());
    let pts: Vec<Point2<f64>> = radii.iter().map(|&r| data.centre + r * dir).collect();
    let vals = evaluate_exterior(boundary, data, &pts, 0.0)?;
    Ok(vals
        .iter()
        .zip(radii)
        .map(|(u, r)| (u - data.a - data.log_coefficient * r.ln()).abs())
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransmissionReport {
    /// `max |u₂ - u₁|` at nodes of `Γ_t`.
    pub dirichlet_jump: f64,
    /// Lumped `L²(Γ)` norm of the nodal `p ∂ₙu₁ - ∂ₙu₂ - q`.
    pub neumann_jump: f64,
    pub neumann_jump_max: f64,
    /// Lumped `L²(Γ_s)` norm of the nodal distance from `p ∂ₙu₁` to `∂j(u₂ - u₁)`.
    pub inclusion: f64,
    pub inclusion_max: f64,
}

/// Residuals of the transmission conditions at a coupled solution `x`.
///
/// `b_q` is the boundary load vector `(∫_Γ q φ_i)_i`. The interior traction
/// `p ∂ₙu₁` comes from the gradients of the triangles along `Γ`; the exterior
/// normal derivative is `-S g` in the lumped P1 sense.
pub fn transmission_residuals(problem: &HviProblem, x: &DVector<f64>, b_q: &DVector<f64>) -> Result<TransmissionReport> {
    let sys = &problem.system;
    check_len("solution", sys.n(), x.len())?;
    let nb = sys.dofs.n_boundary();
    check_len("boundary load", nb, b_q.len())?;
    let mesh = &sys.mesh;
    let (u, v) = sys.split(x);
    let g = sys.total_trace(x);
    let jump = sys.dofs.expand_gamma_s(&v);

    let mut edge_triangle = HashMap::with_capacity(3 * mesh.triangles.len());
    for (k, t) in mesh.triangles.iter().enumerate() {
        for e in 0..3 {
            let (a, b) = (t[e], t[(e + 1) % 3]);
            edge_triangle.insert((a.min(b), a.max(b)), k);
        }
    }

    let bd = &sys.dofs.boundary_dofs;
    let panels = &sys.operators.boundary.panels;
    let mut traction = vec![0.0; nb];
    for k in 0..nb {
        let (a, b) = (bd[k], bd[(k + 1) % nb]);
        let t = *edge_triangle
            .get(&(a.min(b), a.max(b)))
            .ok_or_else(|| Error::InvalidMesh(format!("boundary panel {k} has no adjacent triangle")))?;
        traction[k] = sys.interior.flux(&u, t).dot(&panels[k].normal);
    }
    // Nodal tractions and exterior normal derivatives in the lumped P1 sense.
    let sg = sys.steklov.apply(&g);
    let weight = |i: usize| 0.5 * (panels[i].len + panels[(i + nb - 1) % nb].len);
    let nodal_traction =
        |i: usize| 0.5 * (panels[i].len * traction[i] + panels[(i + nb - 1) % nb].len * traction[(i + nb - 1) % nb]) / weight(i);

    let mut dirichlet_jump: f64 = 0.0;
    let mut neumann_sq = 0.0;
    let mut neumann_max: f64 = 0.0;
    for i in 0..nb {
        let r = nodal_traction(i) + (sg[i] - b_q[i]) / weight(i);
        neumann_sq += weight(i) * r * r;
        neumann_max = neumann_max.max(r.abs());
        if sys.dofs.panel_parts[i] == BoundaryPart::T {
            dirichlet_jump = dirichlet_jump.max(jump[i].abs()).max(jump[(i + 1) % nb].abs());
        }
    }

    let mut inclusion_sq = 0.0;
    let mut inclusion_max: f64 = 0.0;
    if let Some(func) = &sys.friction {
        for (i, &k) in sys.dofs.gamma_s_dofs.iter().enumerate() {
            let d = func.laws[i].clarke_interval(v[i]).distance(nodal_traction(k));
            inclusion_sq += func.weights[i] * d * d;
            inclusion_max = inclusion_max.max(d);
        }
    }

    Ok(TransmissionReport {
        dirichlet_jump,
        neumann_jump: neumann_sq.sqrt(),
        neumann_jump_max: neumann_max,
        inclusion: inclusion_sq.sqrt(),
        inclusion_max,
    })
}
