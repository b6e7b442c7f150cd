use std::collections::BTreeMap;

use nalgebra::DVector;

use super::mesh::Mesh2D;
use super::polygon::BoundaryPart;
use crate::error::{Error, Result};

/// Index maps between the P1 spaces on Ω, on Γ and on Γ_s.
#[derive(Debug, Clone)]
pub struct DofMaps {
    pub n_interior: usize,
    /// Boundary node ids in one counterclockwise traversal, starting at the
    /// smallest boundary node id.
    pub boundary_dofs: Vec<usize>,
    /// Label of panel `k`, which joins `boundary_dofs[k]` and `boundary_dofs[k + 1]`.
    pub panel_parts: Vec<BoundaryPart>,
    /// Positions in `boundary_dofs` whose two adjacent panels are both on Γ_s.
    pub gamma_s_dofs: Vec<usize>,
    /// Mesh node -> position in `boundary_dofs`.
    pub trace_map: Vec<Option<usize>>,
}

impl DofMaps {
    pub fn new(mesh: &Mesh2D) -> Result<Self> {
        let mut next: BTreeMap<usize, (usize, BoundaryPart)> = BTreeMap::new();
        for e in &mesh.boundary_edges {
            if next.insert(e.a, (e.b, e.part)).is_some() {
                return Err(Error::InvalidMesh(format!("boundary branches at node {}", e.a)));
            }
        }
        let start = *next
            .keys()
            .min()
            .ok_or_else(|| Error::InvalidMesh("no boundary edges".into()))?;
        let mut boundary_dofs = Vec::with_capacity(next.len());
        let mut panel_parts = Vec::with_capacity(next.len());
        let mut cur = start;
        loop {
            let (nxt, part) = next[&cur];
            boundary_dofs.push(cur);
            panel_parts.push(part);
            cur = nxt;
            if cur == start {
                break;
            }
            if boundary_dofs.len() > next.len() || !next.contains_key(&cur) {
                return Err(Error::InvalidMesh("boundary is not a single closed curve".into()));
            }
        }
        if boundary_dofs.len() != next.len() {
            return Err(Error::InvalidMesh(
                "boundary consists of several closed curves".into(),
            ));
        }
        let nb = boundary_dofs.len();
        let gamma_s_dofs: Vec<usize> = (0..nb)
            .filter(|&k| panel_parts[k] == BoundaryPart::S && panel_parts[(k + nb - 1) % nb] == BoundaryPart::S)
            .collect();
        if gamma_s_dofs.is_empty() {
            return Err(Error::GammaSUnresolved);
        }
        let mut trace_map = vec![None; mesh.n_nodes()];
        for (k, &node) in boundary_dofs.iter().enumerate() {
            trace_map[node] = Some(k);
        }
        Ok(DofMaps {
            n_interior: mesh.n_nodes(),
            boundary_dofs,
            panel_parts,
            gamma_s_dofs,
            trace_map,
        })
    }

    pub fn n_boundary(&self) -> usize {
        self.boundary_dofs.len()
    }

    pub fn n_gamma_s(&self) -> usize {
        self.gamma_s_dofs.len()
    }

    /// Mesh node ids of the Γ_s unknowns.
    pub fn gamma_s_nodes(&self) -> Vec<usize> {
        self.gamma_s_dofs.iter().map(|&k| self.boundary_dofs[k]).collect()
    }

    /// Boundary trace of an interior coefficient vector.
    pub fn trace(&self, u: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.n_boundary(), self.boundary_dofs.iter().map(|&i| u[i]))
    }

    /// Adjoint of [`DofMaps::trace`]: scatters boundary values into the interior space.
    pub fn trace_adjoint(&self, b: &DVector<f64>) -> DVector<f64> {
        let mut u = DVector::zeros(self.n_interior);
        for (k, &i) in self.boundary_dofs.iter().enumerate() {
            u[i] += b[k];
        }
        u
    }

    /// Extension by zero from Γ_s to Γ.
    pub fn expand_gamma_s(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut b = DVector::zeros(self.n_boundary());
        for (j, &k) in self.gamma_s_dofs.iter().enumerate() {
            b[k] = v[j];
        }
        b
    }

    /// Restriction from Γ to the Γ_s unknowns (adjoint of the extension).
    pub fn restrict_gamma_s(&self, b: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.n_gamma_s(), self.gamma_s_dofs.iter().map(|&k| b[k]))
    }

    /// Lengths of the boundary panels.
    pub fn panel_lengths(&self, mesh: &Mesh2D) -> Vec<f64> {
        let nb = self.n_boundary();
        (0..nb)
            .map(|k| {
                let (a, b) = (self.boundary_dofs[k], self.boundary_dofs[(k + 1) % nb]);
                (mesh.nodes[b] - mesh.nodes[a]).norm()
            })
            .collect()
    }

    /// Lumped (trapezoidal) weights of the Γ_s unknowns.
    pub fn gamma_s_weights(&self, mesh: &Mesh2D) -> DVector<f64> {
        let len = self.panel_lengths(mesh);
        let nb = self.n_boundary();
        DVector::from_iterator(
            self.n_gamma_s(),
            self.gamma_s_dofs.iter().map(|&k| 0.5 * (len[k] + len[(k + nb - 1) % nb])),
        )
    }
}
