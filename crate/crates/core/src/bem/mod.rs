//! Galerkin boundary elements for the 2D Laplace kernel `G(x, y) = -(1/2π) log|x - y|`
//! and the symmetric exterior Poincaré–Steklov operator.
//!
//! Densities are P0 on panels, traces are P1 on nodes. With this kernel the
//! exterior Dirichlet-to-Neumann map reads
//!
//! ```text
//! S = W + (½M - K)ᵀ V⁻¹ (½M - K)
//! ```
//!
//! which is the familiar `½[W + (I - K')V⁻¹(I - K)]` written for operators
//! whose kernels carry the full `1/2π` factor.

mod panel;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, Point2};
use rayon::prelude::*;

pub use panel::Panel;

use crate::error::{check_len, Error, Result};
use crate::geometry::{DofMaps, Mesh2D};
use crate::linalg::{cholesky, complement_basis, gauss_legendre, generalized_eigenvalues, symmetrize};

const INV_2PI: f64 = 0.5 / std::f64::consts::PI;
const OUTER_ORDER: usize = 8;
const GRADING: f64 = 0.15;
const GRADING_LEVELS: i32 = 4;

/// Closed counterclockwise polygonal curve; panel `k` joins nodes `k` and `k + 1`.
#[derive(Debug, Clone)]
pub struct BoundaryMesh {
    pub nodes: Vec<Point2<f64>>,
    pub panels: Vec<Panel>,
}

impl BoundaryMesh {
    pub fn new(nodes: Vec<Point2<f64>>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::InvalidMesh("boundary needs at least 3 nodes".into()));
        }
        let n = nodes.len();
        let panels: Vec<Panel> = (0..n).map(|k| Panel::new(nodes[k], nodes[(k + 1) % n])).collect();
        if panels.iter().any(|p| !(p.len > 0.0)) {
            return Err(Error::InvalidMesh("zero-length boundary panel".into()));
        }
        Ok(BoundaryMesh { nodes, panels })
    }

    pub fn from_mesh(mesh: &Mesh2D, dofs: &DofMaps) -> Result<Self> {
        Self::new(dofs.boundary_dofs.iter().map(|&i| mesh.nodes[i]).collect())
    }

    /// Regular polygon with `n` nodes on the circle of radius `radius`.
    pub fn circle(radius: f64, n: usize) -> Result<Self> {
        Self::new(
            (0..n)
                .map(|k| {
                    let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                    Point2::new(radius * t.cos(), radius * t.sin())
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.panels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.panels.is_empty()
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, p) in self.nodes.iter().enumerate() {
            for q in &self.nodes[i + 1..] {
                d = d.max((p - q).norm());
            }
        }
        d
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.panels.iter().map(|p| p.len).collect()
    }

    /// P1 mass matrix on the curve.
    pub fn mass_p1(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for (k, p) in self.panels.iter().enumerate() {
            let j = (k + 1) % n;
            m[(k, k)] += p.len / 3.0;
            m[(j, j)] += p.len / 3.0;
            m[(k, j)] += p.len / 6.0;
            m[(j, k)] += p.len / 6.0;
        }
        m
    }

    /// Single layer potential `∫ G(x, y) ψ(y) ds_y` of a P0 density.
    pub fn single_layer_potential(&self, psi: &DVector<f64>, x: &Point2<f64>) -> f64 {
        -INV_2PI
            * self
                .panels
                .iter()
                .zip(psi.iter())
                .map(|(p, &w)| w * p.log_integral(x))
                .sum::<f64>()
    }

    /// Double layer potential `∫ ∂_{n_y} G(x, y) g(y) ds_y` of a P1 trace.
    pub fn double_layer_potential(&self, g: &DVector<f64>, x: &Point2<f64>) -> f64 {
        let n = self.len();
        INV_2PI
            * self
                .panels
                .iter()
                .enumerate()
                .map(|(k, p)| {
                    let [a, b] = p.double_layer_hats(x);
                    a * g[k] + b * g[(k + 1) % n]
                })
                .sum::<f64>()
    }

    /// Whether `x` lies strictly inside the curve (winding number test).
    pub fn encloses(&self, x: &Point2<f64>) -> bool {
        let w: f64 = self.panels.iter().map(|p| p.double_layer_const(x)).sum();
        w.abs() > std::f64::consts::PI
    }

    pub fn distance(&self, x: &Point2<f64>) -> f64 {
        self.panels
            .iter()
            .map(|p| crate::geometry::segment_distance(x, &p.a, &p.b))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Outer quadrature on `[0, 1]`, optionally graded toward an endpoint.
#[derive(Debug, Clone)]
struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Rule {
    fn gauss() -> Self {
        let (nodes, weights) = gauss_legendre(OUTER_ORDER);
        Rule { nodes, weights }
    }

    fn graded_to_zero() -> Self {
        let (x, w) = gauss_legendre(OUTER_ORDER);
        let mut breaks = vec![0.0];
        for l in (1..GRADING_LEVELS).rev() {
            breaks.push(GRADING.powi(l));
        }
        breaks.push(1.0);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for s in breaks.windows(2) {
            let h = s[1] - s[0];
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(s[0] + h * xi);
                weights.push(h * wi);
            }
        }
        Rule { nodes, weights }
    }

    fn graded_to_one() -> Self {
        let r = Self::graded_to_zero();
        Rule {
            nodes: r.nodes.iter().map(|t| 1.0 - t).collect(),
            weights: r.weights,
        }
    }
}

/// Galerkin matrices of the boundary integral operators.
#[derive(Debug, Clone)]
pub struct BoundaryOperatorSet {
    pub boundary: BoundaryMesh,
    /// Single layer, P0 × P0.
    pub v: DMatrix<f64>,
    /// Double layer, P0 test × P1 trial.
    pub k: DMatrix<f64>,
    /// Hypersingular, P1 × P1.
    pub w: DMatrix<f64>,
    /// Identity pairing, P0 × P1.
    pub m: DMatrix<f64>,
    /// Identity pairing, P1 × P1.
    pub mass: DMatrix<f64>,
}

fn neighbours(k: usize, l: usize, n: usize) -> Option<bool> {
    // Some(true): l follows k (shared end of k); Some(false): l precedes k.
    if (k + 1) % n == l {
        Some(true)
    } else if (l + 1) % n == k {
        Some(false)
    } else {
        None
    }
}

pub fn assemble_boundary_operators(boundary: &BoundaryMesh) -> Result<BoundaryOperatorSet> {
    let diam = boundary.diameter();
    if diam >= 1.0 {
        return Err(Error::CapacityViolation(diam));
    }
    let n = boundary.len();
    let panels = &boundary.panels;
    let gauss = Rule::gauss();
    let to_start = Rule::graded_to_zero();
    let to_end = Rule::graded_to_one();
    let pick = |k: usize, l: usize| match neighbours(k, l, n) {
        Some(true) => &to_end,
        Some(false) => &to_start,
        None => &gauss,
    };

    let v_rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let pk = &panels[k];
            let mut row = vec![0.0; n];
            for (l, pl) in panels.iter().enumerate().skip(k) {
                row[l] = if l == k {
                    -INV_2PI * pk.len * pk.len * (pk.len.ln() - 1.5)
                } else {
                    let rule = pick(k, l);
                    let s: f64 = rule
                        .nodes
                        .iter()
                        .zip(&rule.weights)
                        .map(|(&t, &w)| w * pl.log_integral(&pk.point(t)))
                        .sum();
                    -INV_2PI * pk.len * s
                };
            }
            row
        })
        .collect();
    let mut v = DMatrix::zeros(n, n);
    for (k, row) in v_rows.iter().enumerate() {
        for l in k..n {
            v[(k, l)] = row[l];
            v[(l, k)] = row[l];
        }
    }

    let k_rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let pk = &panels[k];
            let mut row = vec![0.0; n];
            for (l, pl) in panels.iter().enumerate() {
                if l == k {
                    continue;
                }
                let rule = pick(k, l);
                let (mut a, mut b) = (0.0, 0.0);
                for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                    let [ha, hb] = pl.double_layer_hats(&pk.point(t));
                    a += w * ha;
                    b += w * hb;
                }
                row[l] += INV_2PI * pk.len * a;
                row[(l + 1) % n] += INV_2PI * pk.len * b;
            }
            row
        })
        .collect();
    let k_mat = DMatrix::from_fn(n, n, |i, j| k_rows[i][j]);

    let mut m = DMatrix::zeros(n, n);
    let mut d = DMatrix::zeros(n, n);
    for (k, p) in panels.iter().enumerate() {
        let j = (k + 1) % n;
        m[(k, k)] += 0.5 * p.len;
        m[(k, j)] += 0.5 * p.len;
        d[(k, k)] -= 1.0 / p.len;
        d[(k, j)] += 1.0 / p.len;
    }
    let mut w = d.transpose() * &v * &d;
    symmetrize(&mut w);

    Ok(BoundaryOperatorSet {
        boundary: boundary.clone(),
        v,
        k: k_mat,
        w,
        m,
        mass: boundary.mass_p1(),
    })
}

/// Symmetric exterior Dirichlet-to-Neumann matrix on P1 traces.
#[derive(Debug, Clone)]
pub struct SteklovOperator {
    pub s: DMatrix<f64>,
    /// Smallest Rayleigh quotient against `W + M` on the complement of constants.
    pub c_s_discrete: f64,
    /// Relative asymmetry of the matrix before symmetrization.
    pub asymmetry: f64,
    v_factor: Cholesky<f64, Dyn>,
    /// `½M - K`.
    c: DMatrix<f64>,
}

pub fn assemble_steklov(ops: &BoundaryOperatorSet) -> Result<SteklovOperator> {
    let v_factor = cholesky(&ops.v, "single layer matrix")?;
    let c = &ops.m * 0.5 - &ops.k;
    let y = v_factor.solve(&c);
    let mut s = &ops.w + c.transpose() * y;
    let asymmetry = symmetrize(&mut s);
    let c_s_discrete = discrete_cs(&s, &(&ops.w + &ops.mass))?;
    Ok(SteklovOperator {
        s,
        c_s_discrete,
        asymmetry,
        v_factor,
        c,
    })
}

/// Smallest generalized Rayleigh quotient of `s` against `norm` on
/// `{x : 1ᵀ norm x = 0}`.
pub fn discrete_cs(s: &DMatrix<f64>, norm: &DMatrix<f64>) -> Result<f64> {
    let ones = DVector::from_element(s.nrows(), 1.0);
    let q = complement_basis(&(norm * ones));
    let vals = generalized_eigenvalues(&(q.transpose() * s * &q), &(q.transpose() * norm * &q))?;
    let c = vals[0];
    if c > 0.0 {
        Ok(c)
    } else {
        Err(Error::Factorization(format!(
            "Steklov matrix is not positive on the complement of constants (c_S = {c})"
        )))
    }
}

impl SteklovOperator {
    pub fn apply(&self, g: &DVector<f64>) -> DVector<f64> {
        &self.s * g
    }

    /// `S - (S1)(S1)ᵀ / 1ᵀS1`: annihilates constants and agrees with `S` on
    /// traces orthogonal to the equilibrium density.
    pub fn radiation_corrected(&self) -> DMatrix<f64> {
        let ones = DVector::from_element(self.s.nrows(), 1.0);
        let d = &self.s * &ones;
        let c = ones.dot(&d);
        &self.s - &d * d.transpose() / c
    }

    /// Exterior normal derivative `∂ₙu` (normal pointing out of Ω) of the
    /// exterior harmonic field with trace `g`: `V ψ = (K - ½M) g`.
    pub fn neumann_density(&self, g: &DVector<f64>) -> Result<DVector<f64>> {
        check_len("boundary trace", self.c.ncols(), g.len())?;
        Ok(-self.v_factor.solve(&(&self.c * g)))
    }
}

/// Exterior Dirichlet-to-Neumann eigenvalue on the circle of radius `r` for
/// the Fourier mode `n`.
pub fn circle_steklov_oracle(r: f64, n: i64) -> f64 {
    n.unsigned_abs() as f64 / r
}

/// One row of the circle spectral study.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SpectrumRow {
    pub panels: usize,
    pub mode: usize,
    /// Both discrete eigenvalues of the mode pair.
    pub computed: [f64; 2],
    pub exact: f64,
    /// Larger relative error of the pair.
    pub rel_error: f64,
}

/// Discrete exterior Steklov eigenvalues on the circle: the generalized
/// eigenvalues of the radiation-corrected matrix against the P1 mass matrix,
/// ascending. The first one belongs to the constants.
pub fn circle_spectrum(radius: f64, panels: usize) -> Result<Vec<f64>> {
    let b = BoundaryMesh::circle(radius, panels)?;
    let ops = assemble_boundary_operators(&b)?;
    let st = assemble_steklov(&ops)?;
    generalized_eigenvalues(&st.radiation_corrected(), &ops.mass)
}

pub fn circle_spectral_study(radius: f64, panels: &[usize], modes: &[usize]) -> Result<Vec<SpectrumRow>> {
    let mut rows = vec![];
    for &n in panels {
        let vals = circle_spectrum(radius, n)?;
        for &m in modes {
            if m == 0 || 2 * m >= vals.len() {
                return Err(Error::InvalidParameter(format!("mode {m} is not resolved by {n} panels")));
            }
            let exact = circle_steklov_oracle(radius, m as i64);
            let computed = [vals[2 * m - 1], vals[2 * m]];
            let rel_error = computed.iter().map(|v| (v / exact - 1.0).abs()).fold(0.0, f64::max);
            rows.push(SpectrumRow {
                panels: n,
                mode: m,
                computed,
                exact,
                rel_error,
            });
        }
    }
    Ok(rows)
}

/// Observed order `log₂(e_h / e_{h/2})` per mode between consecutive panel
/// counts of a study; panel counts are expected to double.
pub fn observed_orders(rows: &[SpectrumRow]) -> Vec<(usize, usize, f64)> {
    let mut out = vec![];
    for a in rows {
        if let Some(b) = rows.iter().find(|b| b.mode == a.mode && b.panels == 2 * a.panels) {
            out.push((a.mode, a.panels, (a.rel_error / b.rel_error).log2()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_values() {
        assert_eq!(circle_steklov_oracle(0.5, 1), 2.0);
        assert_eq!(circle_steklov_oracle(0.5, 0), 0.0);
        assert_eq!(circle_steklov_oracle(0.25, 3), 12.0);
    }

    #[test]
    fn refuses_large_boundaries() {
        let b = BoundaryMesh::circle(0.6, 16).unwrap();
        assert!(matches!(assemble_boundary_operators(&b), Err(Error::CapacityViolation(_))));
    }

    #[test]
    fn circle_operators_have_expected_structure() {
        let b = BoundaryMesh::circle(0.25, 64).unwrap();
        let ops = assemble_boundary_operators(&b).unwrap();
        let ones = DVector::from_element(64, 1.0);
        assert!((&ops.w * &ones).amax() <= 1e-10);
        // K1 = -1/2 on a closed curve.
        let k1 = &ops.k * &ones;
        let half = &ops.m * &ones * 0.5;
        assert!((k1 + half).amax() < 1e-8);
        assert!((&ops.v - ops.v.transpose()).amax() == 0.0);
    }
}
