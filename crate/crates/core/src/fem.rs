//! P1 finite elements for the quasilinear interior operator
//! `DG(u; v) = ∫ p(|∇u|) ∇u·∇v`.

use nalgebra::{DMatrix, DVector, Point2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::geometry::Mesh2D;

/// Coefficient function `p` of the radial flux `p(|∇u|)∇u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NonlinearityP {
    /// `p(t) = p`.
    Linear { p: f64 },
    /// `p(t) = a + b / (1 + t²)`.
    Rational { a: f64, b: f64 },
}

impl NonlinearityP {
    pub fn linear(p: f64) -> Result<Self> {
        let nl = NonlinearityP::Linear { p };
        nl.validate()?;
        Ok(nl)
    }

    pub fn rational(a: f64, b: f64) -> Result<Self> {
        let nl = NonlinearityP::Rational { a, b };
        nl.validate()?;
        Ok(nl)
    }

    /// Rejects parameters for which `t·p(t)` is not strictly increasing.
    pub fn validate(&self) -> Result<()> {
        match *self {
            NonlinearityP::Linear { p } if p > 0.0 && p.is_finite() => Ok(()),
            NonlinearityP::Linear { p } => {
                Err(Error::InvalidParameter(format!("linear p must be positive, got {p}")))
            }
            NonlinearityP::Rational { a, b } => {
                if !(b >= 0.0) || !b.is_finite() || !a.is_finite() {
                    Err(Error::InvalidParameter(format!("rational p needs finite b >= 0, got b = {b}")))
                } else if !(a > b / 8.0) || !(a > 0.0) {
                    Err(Error::InvalidParameter(format!(
                        "rational p needs a > b/8 for t*p(t) to increase, got a = {a}, b = {b}"
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn p(&self, t: f64) -> f64 {
        match *self {
            NonlinearityP::Linear { p } => p,
            NonlinearityP::Rational { a, b } => a + b / (1.0 + t * t),
        }
    }

    /// `p'(t) / t`, the coefficient of `∇u ∇uᵀ` in the flux Jacobian.
    pub fn dp_over_t(&self, t: f64) -> f64 {
        match *self {
            NonlinearityP::Linear { .. } => 0.0,
            NonlinearityP::Rational { b, .. } => {
                let s = 1.0 + t * t;
                -2.0 * b / (s * s)
            }
        }
    }

    /// `g(t) = ∫₀ᵗ s p(s) ds`.
    pub fn g(&self, t: f64) -> f64 {
        match *self {
            NonlinearityP::Linear { p } => 0.5 * p * t * t,
            NonlinearityP::Rational { a, b } => 0.5 * a * t * t + 0.5 * b * (t * t).ln_1p(),
        }
    }

    /// `sup p`.
    pub fn p0(&self) -> f64 {
        match *self {
            NonlinearityP::Linear { p } => p,
            NonlinearityP::Rational { a, b } => a + b,
        }
    }

    /// `inf_t min(p(t), (t p(t))')`; for the rational family the derivative
    /// `a + b(1 - t²)/(1 + t²)²` bottoms out at `t = √3`.
    pub fn monotonicity_constant(&self) -> f64 {
        match *self {
            NonlinearityP::Linear { p } => p,
            NonlinearityP::Rational { a, b } => {
                if b > 0.0 {
                    a - b / 8.0
                } else {
                    a
                }
            }
        }
    }
}

/// Interior operator on a fixed mesh.
#[derive(Debug, Clone)]
pub struct InteriorOperator {
    pub nonlinearity: NonlinearityP,
    pub c_g: f64,
    n: usize,
    triangles: Vec<[usize; 3]>,
    areas: Vec<f64>,
    grads: Vec<[Vector2<f64>; 3]>,
    nodes: Vec<Point2<f64>>,
}

impl InteriorOperator {
    pub fn new(mesh: &Mesh2D, nonlinearity: NonlinearityP) -> Result<Self> {
        nonlinearity.validate()?;
        let mut areas = Vec::with_capacity(mesh.triangles.len());
        let mut grads = Vec::with_capacity(mesh.triangles.len());
        for (k, t) in mesh.triangles.iter().enumerate() {
            let area = mesh.triangle_area(k);
            let g = std::array::from_fn(|i| {
                let d = mesh.nodes[t[(i + 2) % 3]] - mesh.nodes[t[(i + 1) % 3]];
                Vector2::new(-d.y, d.x) / (2.0 * area)
            });
            areas.push(area);
            grads.push(g);
        }
        Ok(InteriorOperator {
            nonlinearity,
            c_g: nonlinearity.monotonicity_constant(),
            n: mesh.n_nodes(),
            triangles: mesh.triangles.clone(),
            areas,
            grads,
            nodes: mesh.nodes.clone(),
        })
    }

    pub fn n_dofs(&self) -> usize {
        self.n
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn area(&self, k: usize) -> f64 {
        self.areas[k]
    }

    pub fn centroid(&self, k: usize) -> Point2<f64> {
        let t = self.triangles[k];
        Point2::from((self.nodes[t[0]].coords + self.nodes[t[1]].coords + self.nodes[t[2]].coords) / 3.0)
    }

    /// Constant gradient of `u` on triangle `k`.
    pub fn gradient(&self, u: &DVector<f64>, k: usize) -> Vector2<f64> {
        let t = self.triangles[k];
        let g = &self.grads[k];
        g[0] * u[t[0]] + g[1] * u[t[1]] + g[2] * u[t[2]]
    }

    /// Gradients of the three hat functions on triangle `k`.
    pub fn hat_gradients(&self, k: usize) -> &[Vector2<f64>; 3] {
        &self.grads[k]
    }

    pub fn flux(&self, u: &DVector<f64>, k: usize) -> Vector2<f64> {
        let g = self.gradient(u, k);
        g * self.nonlinearity.p(g.norm())
    }

    pub fn energy(&self, u: &DVector<f64>) -> Result<f64> {
        check_len("interior coefficients", self.n, u.len())?;
        Ok((0..self.triangles.len())
            .map(|k| self.areas[k] * self.nonlinearity.g(self.gradient(u, k).norm()))
            .sum())
    }

    /// `DG(u; v)`.
    pub fn apply(&self, u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
        check_len("interior coefficients", self.n, u.len())?;
        check_len("interior direction", self.n, v.len())?;
        Ok((0..self.triangles.len())
            .map(|k| self.areas[k] * self.flux(u, k).dot(&self.gradient(v, k)))
            .sum())
    }

    /// The vector `(DG(u; φ_i))_i`.
    pub fn residual(&self, u: &DVector<f64>) -> DVector<f64> {
        let mut r = DVector::zeros(self.n);
        for k in 0..self.triangles.len() {
            let f = self.flux(u, k) * self.areas[k];
            let t = self.triangles[k];
            for i in 0..3 {
                r[t[i]] += f.dot(&self.grads[k][i]);
            }
        }
        r
    }

    /// Derivative of [`InteriorOperator::residual`].
    pub fn jacobian(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let mut j = DMatrix::zeros(self.n, self.n);
        for k in 0..self.triangles.len() {
            let g = self.gradient(u, k);
            let t = g.norm();
            let p = self.nonlinearity.p(t);
            let q = self.nonlinearity.dp_over_t(t);
            let tri = self.triangles[k];
            let gr = &self.grads[k];
            for a in 0..3 {
                for b in 0..3 {
                    let v = p * gr[a].dot(&gr[b]) + q * gr[a].dot(&g) * g.dot(&gr[b]);
                    j[(tri[a], tri[b])] += self.areas[k] * v;
                }
            }
        }
        j
    }

    /// Laplace stiffness matrix.
    pub fn stiffness(&self) -> DMatrix<f64> {
        let mut s = DMatrix::zeros(self.n, self.n);
        for k in 0..self.triangles.len() {
            let tri = self.triangles[k];
            for a in 0..3 {
                for b in 0..3 {
                    s[(tri[a], tri[b])] += self.areas[k] * self.grads[k][a].dot(&self.grads[k][b]);
                }
            }
        }
        s
    }

    /// Consistent P1 mass matrix.
    pub fn mass(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for k in 0..self.triangles.len() {
            let tri = self.triangles[k];
            for a in 0..3 {
                for b in 0..3 {
                    let w = if a == b { 2.0 } else { 1.0 };
                    m[(tri[a], tri[b])] += self.areas[k] * w / 12.0;
                }
            }
        }
        m
    }

    /// Row sums of the mass matrix.
    pub fn lumped_mass(&self) -> DVector<f64> {
        let mut m = DVector::zeros(self.n);
        for k in 0..self.triangles.len() {
            for &i in &self.triangles[k] {
                m[i] += self.areas[k] / 3.0;
            }
        }
        m
    }

    /// Discrete `|u|²_{H¹}`.
    pub fn seminorm_sq(&self, u: &DVector<f64>) -> f64 {
        (0..self.triangles.len())
            .map(|k| self.areas[k] * self.gradient(u, k).norm_squared())
            .sum()
    }

    /// `∫ f φ_i` by the edge-midpoint rule, exact for quadratic `f`.
    pub fn load_fn(&self, f: impl Fn(Point2<f64>) -> f64) -> DVector<f64> {
        let mut b = DVector::zeros(self.n);
        for k in 0..self.triangles.len() {
            let t = self.triangles[k];
            let p = [self.nodes[t[0]], self.nodes[t[1]], self.nodes[t[2]]];
            let mid = |i: usize, j: usize| Point2::from(0.5 * (p[i].coords + p[j].coords));
            let f01 = f(mid(0, 1));
            let f12 = f(mid(1, 2));
            let f20 = f(mid(2, 0));
            let w = self.areas[k] / 6.0;
            b[t[0]] += w * (f01 + f20);
            b[t[1]] += w * (f01 + f12);
            b[t[2]] += w * (f12 + f20);
        }
        b
    }

    /// `∫ f φ_i` for P1 nodal data `f`.
    pub fn load_nodal(&self, f: &DVector<f64>) -> Result<DVector<f64>> {
        check_len("nodal load", self.n, f.len())?;
        Ok(self.mass() * f)
    }

    /// `∫ f φ_i` for data constant on each triangle.
    pub fn load_cellwise(&self, f: &[f64]) -> Result<DVector<f64>> {
        check_len("cellwise load", self.triangles.len(), f.len())?;
        let mut b = DVector::zeros(self.n);
        for (k, t) in self.triangles.iter().enumerate() {
            for &i in t {
                b[i] += f[k] * self.areas[k] / 3.0;
            }
        }
        Ok(b)
    }

    /// Largest per-triangle ratio `|F(∇u) - F(∇v)| / |∇u - ∇v|` for the flux
    /// `F(ξ) = p(|ξ|)ξ`; bounds the Lipschitz constant of `DG` seen by this pair.
    pub fn empirical_lipschitz(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        (0..self.triangles.len())
            .filter_map(|k| {
                let (gu, gv) = (self.gradient(u, k), self.gradient(v, k));
                let d = (gu - gv).norm();
                (d > 0.0).then(|| (self.flux(u, k) - self.flux(v, k)).norm() / d)
            })
            .fold(0.0, f64::max)
    }
}
