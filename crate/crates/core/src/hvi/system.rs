use std::sync::OnceLock;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, Point2};

use super::SmallnessReport;
use crate::bem::{assemble_boundary_operators, assemble_steklov, BoundaryMesh, BoundaryOperatorSet, SteklovOperator};
use crate::data::ScalarField;
use crate::error::{check_len, Error, Result};
use crate::fem::{InteriorOperator, NonlinearityP};
use crate::geometry::{DofMaps, Mesh2D};
use crate::linalg::{cholesky, gauss_legendre, generalized_eigenvalues};
use crate::superpotential::{BoundaryFunctional, FrictionLaw};

/// Everything that depends on the mesh, `p` and `j` but not on the data.
///
/// Unknowns are stacked as `x = (u, v)` with `u` the P1 coefficients on all
/// mesh nodes and `v` the jump coefficients on the Γ_s unknowns. The total
/// exterior trace is `g = T u + E v`.
#[derive(Debug)]
pub struct CoupledSystem {
    pub mesh: Mesh2D,
    pub dofs: DofMaps,
    pub interior: InteriorOperator,
    pub operators: BoundaryOperatorSet,
    pub steklov: SteklovOperator,
    pub friction: Option<BoundaryFunctional>,
    /// Lumped Γ_s weights.
    pub weights: DVector<f64>,
    pub stiffness: DMatrix<f64>,
    pub mass: DMatrix<f64>,
    /// `PᵀSP` with `P = [T E]`.
    pub coupling: DMatrix<f64>,
    /// Discrete `E`-inner product: `K + M` on `u`, `W + M_Γ` on `v`.
    pub e_metric: DMatrix<f64>,
    e_factor: Cholesky<f64, Dyn>,
    smallness: OnceLock<Result<SmallnessReport>>,
}

impl CoupledSystem {
    /// Assembles all operators. The mesh must already have diameter below one.
    pub fn new(mesh: Mesh2D, nonlinearity: NonlinearityP, law: Option<FrictionLaw>) -> Result<Self> {
        let dofs = DofMaps::new(&mesh)?;
        let weights = dofs.gamma_s_weights(&mesh);
        let friction = law
            .map(|l| BoundaryFunctional::homogeneous(l, weights.clone()))
            .transpose()?;
        Self::with_functional(mesh, dofs, nonlinearity, friction)
    }

    /// Like [`CoupledSystem::new`] with an explicit (possibly node-dependent) functional.
    pub fn with_functional(
        mesh: Mesh2D,
        dofs: DofMaps,
        nonlinearity: NonlinearityP,
        friction: Option<BoundaryFunctional>,
    ) -> Result<Self> {
        let weights = dofs.gamma_s_weights(&mesh);
        if let Some(f) = &friction {
            check_len("friction functional", dofs.n_gamma_s(), f.len())?;
        }
        let interior = InteriorOperator::new(&mesh, nonlinearity)?;
        let boundary = BoundaryMesh::from_mesh(&mesh, &dofs)?;
        let operators = assemble_boundary_operators(&boundary)?;
        let steklov = assemble_steklov(&operators)?;
        let stiffness = interior.stiffness();
        let mass = interior.mass();

        let (nu, nv) = (dofs.n_interior, dofs.n_gamma_s());
        let n = nu + nv;
        // Boundary position carried by each unknown, if any.
        let pos: Vec<Option<usize>> = (0..n)
            .map(|j| if j < nu { dofs.trace_map[j] } else { Some(dofs.gamma_s_dofs[j - nu]) })
            .collect();
        let mut coupling = DMatrix::zeros(n, n);
        for i in 0..n {
            let Some(pi) = pos[i] else { continue };
            for j in 0..n {
                if let Some(pj) = pos[j] {
                    coupling[(i, j)] = steklov.s[(pi, pj)];
                }
            }
        }

        let mut e_metric = DMatrix::zeros(n, n);
        e_metric.view_mut((0, 0), (nu, nu)).copy_from(&(&stiffness + &mass));
        let nb_metric = &operators.w + &operators.mass;
        for (a, &ka) in dofs.gamma_s_dofs.iter().enumerate() {
            for (b, &kb) in dofs.gamma_s_dofs.iter().enumerate() {
                e_metric[(nu + a, nu + b)] = nb_metric[(ka, kb)];
            }
        }
        let e_factor = cholesky(&e_metric, "E-norm metric")?;

        Ok(CoupledSystem {
            mesh,
            dofs,
            interior,
            operators,
            steklov,
            friction,
            weights,
            stiffness,
            mass,
            coupling,
            e_metric,
            e_factor,
            smallness: OnceLock::new(),
        })
    }

    pub fn n_u(&self) -> usize {
        self.dofs.n_interior
    }

    pub fn n_v(&self) -> usize {
        self.dofs.n_gamma_s()
    }

    pub fn n(&self) -> usize {
        self.n_u() + self.n_v()
    }

    pub fn split(&self, x: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let nu = self.n_u();
        (x.rows(0, nu).into_owned(), x.rows(nu, self.n_v()).into_owned())
    }

    pub fn join(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let mut x = DVector::zeros(self.n());
        x.rows_mut(0, self.n_u()).copy_from(u);
        x.rows_mut(self.n_u(), self.n_v()).copy_from(v);
        x
    }

    /// `g = u|_Γ + v` on the boundary nodes.
    pub fn total_trace(&self, x: &DVector<f64>) -> DVector<f64> {
        let (u, v) = self.split(x);
        self.dofs.trace(&u) + self.dofs.expand_gamma_s(&v)
    }

    /// Adjoint of [`CoupledSystem::total_trace`].
    pub fn total_trace_adjoint(&self, b: &DVector<f64>) -> DVector<f64> {
        self.join(&self.dofs.trace_adjoint(b), &self.dofs.restrict_gamma_s(b))
    }

    /// `G(u) + ½⟨S g, g⟩`.
    pub fn smooth_energy(&self, x: &DVector<f64>) -> f64 {
        let (u, _) = self.split(x);
        let g = self.total_trace(x);
        self.interior.energy(&u).expect("sized") + 0.5 * g.dot(&(&self.steklov.s * &g))
    }

    /// Gradient of [`CoupledSystem::smooth_energy`], i.e. the coupled operator `A(x)`.
    pub fn operator(&self, x: &DVector<f64>) -> DVector<f64> {
        let (u, _) = self.split(x);
        let mut r = &self.coupling * x;
        let dg = self.interior.residual(&u);
        let mut top = r.rows_mut(0, self.n_u());
        top += &dg;
        r
    }

    /// Hessian of [`CoupledSystem::smooth_energy`].
    pub fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let (u, _) = self.split(x);
        let mut h = self.coupling.clone();
        let nu = self.n_u();
        let j = self.interior.jacobian(&u);
        let mut block = h.view_mut((0, 0), (nu, nu));
        block += j;
        h
    }

    /// `A(x)(y) = DG(u; y_u) + ⟨S g(x), g(y)⟩`.
    pub fn apply_a(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        self.operator(x).dot(y)
    }

    pub fn e_norm(&self, x: &DVector<f64>) -> f64 {
        x.dot(&(&self.e_metric * x)).max(0.0).sqrt()
    }

    /// Norm of a functional in the dual of the discrete `E`-norm.
    pub fn dual_norm(&self, r: &DVector<f64>) -> f64 {
        r.dot(&self.e_factor.solve(r)).max(0.0).sqrt()
    }

    /// Riesz representative of a functional in the `E`-inner product.
    pub fn riesz(&self, r: &DVector<f64>) -> DVector<f64> {
        self.e_factor.solve(r)
    }

    /// `(∫_Γ q φ_k)_k` by three-point Gauss on each panel.
    pub fn boundary_load(&self, q: impl Fn(Point2<f64>) -> f64) -> DVector<f64> {
        let (t, w) = gauss_legendre(3);
        let nb = self.dofs.n_boundary();
        let mut b = DVector::zeros(nb);
        for (k, p) in self.operators.boundary.panels.iter().enumerate() {
            for (&s, &ws) in t.iter().zip(&w) {
                let val = q(p.point(s)) * ws * p.len;
                b[k] += val * (1.0 - s);
                b[(k + 1) % nb] += val * s;
            }
        }
        b
    }

    /// `(∫_Γ q φ_k)_k` for `q` constant on each panel.
    pub fn boundary_load_panelwise(&self, q: &[f64]) -> Result<DVector<f64>> {
        let nb = self.dofs.n_boundary();
        check_len("panelwise boundary data", nb, q.len())?;
        let mut b = DVector::zeros(nb);
        for (k, p) in self.operators.boundary.panels.iter().enumerate() {
            b[k] += 0.5 * q[k] * p.len;
            b[(k + 1) % nb] += 0.5 * q[k] * p.len;
        }
        Ok(b)
    }

    /// `λ = (b_f + Tᵀ b_q, Eᵀ b_q)`.
    pub fn lambda_from_loads(&self, b_f: &DVector<f64>, b_q: &DVector<f64>) -> Result<DVector<f64>> {
        check_len("interior load", self.n_u(), b_f.len())?;
        check_len("boundary load", self.dofs.n_boundary(), b_q.len())?;
        let mut lam = self.total_trace_adjoint(b_q);
        let mut top = lam.rows_mut(0, self.n_u());
        top += b_f;
        Ok(lam)
    }

    pub fn lambda(&self, f: &ScalarField, q: &ScalarField) -> Result<DVector<f64>> {
        if !f.is_finite() || !q.is_finite() {
            return Err(Error::InvalidParameter("data fields must be finite".into()));
        }
        let b_f = self.interior.load_fn(|p| f.eval(p));
        let b_q = self.boundary_load(|p| q.eval(p));
        self.lambda_from_loads(&b_f, &b_q)
    }

    /// Cached smallness certificate.
    pub fn smallness(&self) -> Result<&SmallnessReport> {
        self.smallness
            .get_or_init(|| self.compute_smallness())
            .as_ref()
            .map_err(|e| Error::Solver(e.to_string()))
    }

    fn compute_smallness(&self) -> Result<SmallnessReport> {
        let nu = self.n_u();
        let nv = self.n_v();
        let mut a = self.coupling.clone();
        {
            let mut block = a.view_mut((0, 0), (nu, nu));
            block += &self.stiffness * self.interior.c_g;
        }
        let vals = generalized_eigenvalues(&a, &self.e_metric)?;
        let c_a = vals[0];
        let nv_metric = self.e_metric.view((nu, nu), (nv, nv)).into_owned();
        let lumped = DMatrix::from_diagonal(&self.weights);
        let gv = generalized_eigenvalues(&lumped, &nv_metric)?;
        let gamma_norm_sq = *gv.last().unwrap();
        let c_j = self.friction.as_ref().map_or(0.0, BoundaryFunctional::c_j);
        let d_j = self.friction.as_ref().map_or(0.0, BoundaryFunctional::d_j);
        Ok(SmallnessReport {
            c_a,
            gamma_norm_sq,
            c_j,
            d_j,
            margin: c_a - c_j * gamma_norm_sq,
        })
    }
}
