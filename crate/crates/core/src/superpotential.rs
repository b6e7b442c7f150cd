//! Nonmonotone friction superpotential and its Clarke calculus.
//!
//! `j(ξ) = μ₂|ξ| + ((μ₁ - μ₂)/α)(1 - e^{-α|ξ|})` has slope `μ₁` at `0⁺`
//! decaying to `μ₂`, so `∂j(0) = [-μ₁, μ₁]`. The split
//! `j = μ₁|ξ| + h(ξ)` with `h` concave and `C¹` is what the solver exploits.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrictionLaw {
    pub mu1: f64,
    pub mu2: f64,
    pub alpha: f64,
}

/// Closed interval `[lo, hi]` of generalized gradients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClarkeInterval {
    pub lo: f64,
    pub hi: f64,
}

impl ClarkeInterval {
    pub fn contains(&self, t: f64, tol: f64) -> bool {
        t >= self.lo - tol && t <= self.hi + tol
    }

    pub fn distance(&self, t: f64) -> f64 {
        (self.lo - t).max(t - self.hi).max(0.0)
    }

    /// Selection used when a single value is needed: midpoint of the interval.
    pub fn selection(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

impl FrictionLaw {
    pub fn new(mu1: f64, mu2: f64, alpha: f64) -> Result<Self> {
        if !(mu2 > 0.0) || !(mu1 > mu2) || !mu1.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "friction law needs mu1 > mu2 > 0, got mu1 = {mu1}, mu2 = {mu2}"
            )));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("friction law needs alpha > 0, got {alpha}")));
        }
        Ok(FrictionLaw { mu1, mu2, alpha })
    }

    pub fn j(&self, xi: f64) -> f64 {
        let a = xi.abs();
        self.mu2 * a - (self.mu1 - self.mu2) * (-self.alpha * a).exp_m1() / self.alpha
    }

    /// Magnitude of `j'` away from the origin.
    pub fn slope(&self, xi: f64) -> f64 {
        self.mu2 + (self.mu1 - self.mu2) * (-self.alpha * xi.abs()).exp()
    }

    pub fn clarke_interval(&self, xi: f64) -> ClarkeInterval {
        if xi == 0.0 {
            ClarkeInterval {
                lo: -self.mu1,
                hi: self.mu1,
            }
        } else {
            let s = xi.signum() * self.slope(xi);
            ClarkeInterval { lo: s, hi: s }
        }
    }

    /// Generalized directional derivative `j⁰(ξ; z)`.
    pub fn j0(&self, xi: f64, z: f64) -> f64 {
        let c = self.clarke_interval(xi);
        if z >= 0.0 {
            c.hi * z
        } else {
            c.lo * z
        }
    }

    /// `j0` with the kink in `z` replaced by its Moreau envelope of width `eps`.
    pub fn smoothed_j0(&self, eps: f64, xi: f64, z: f64) -> f64 {
        let c = self.clarke_interval(xi);
        let mid = 0.5 * (c.lo + c.hi);
        let rad = 0.5 * (c.hi - c.lo);
        mid * z + rad * huber(eps, z)
    }

    /// Concave remainder `h = j - μ₁|·|`.
    pub fn concave_part(&self, xi: f64) -> f64 {
        self.j(xi) - self.mu1 * xi.abs()
    }

    /// `h'(ξ) = (μ₁ - μ₂)(e^{-α|ξ|} - 1) sign ξ`; continuous with `h'(0) = 0`.
    pub fn concave_part_derivative(&self, xi: f64) -> f64 {
        (self.mu1 - self.mu2) * (-self.alpha * xi.abs()).exp_m1() * xi.signum()
    }

    /// Constant `c_J` of the one-sided Lipschitz bound
    /// `j⁰(y₁; y₂ - y₁) + j⁰(y₂; y₁ - y₂) ≤ c_J |y₁ - y₂|²`.
    pub fn one_sided_lipschitz(&self) -> f64 {
        self.alpha * (self.mu1 - self.mu2)
    }

    /// `(c_{j,1}, c_{j,2})` with `|η| ≤ c_{j,1}(1 + |ξ|)` and `η ξ ≥ -c_{j,2}|ξ|`.
    pub fn growth_constants(&self) -> (f64, f64) {
        (self.mu1, 0.0)
    }
}

/// Moreau envelope of `|z|` with parameter `eps`.
pub fn huber(eps: f64, z: f64) -> f64 {
    let a = z.abs();
    if a <= eps {
        0.5 * z * z / eps
    } else {
        a - 0.5 * eps
    }
}

pub fn huber_derivative(eps: f64, z: f64) -> f64 {
    if z.abs() <= eps {
        z / eps
    } else {
        z.signum()
    }
}

pub fn huber_second_derivative(eps: f64, z: f64) -> f64 {
    if z.abs() <= eps {
        1.0 / eps
    } else {
        0.0
    }
}

/// Lumped boundary functional `J_h(v) = Σ w_i j_i(v_i)` over the Γ_s unknowns.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFunctional {
    pub laws: Vec<FrictionLaw>,
    pub weights: DVector<f64>,
}

impl BoundaryFunctional {
    pub fn new(laws: Vec<FrictionLaw>, weights: DVector<f64>) -> Result<Self> {
        check_len("friction laws", weights.len(), laws.len())?;
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::InvalidParameter("lumped weights must be positive".into()));
        }
        Ok(BoundaryFunctional { laws, weights })
    }

    pub fn homogeneous(law: FrictionLaw, weights: DVector<f64>) -> Result<Self> {
        Self::new(vec![law; weights.len()], weights)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn value(&self, v: &DVector<f64>) -> Result<f64> {
        check_len("gamma_s coefficients", self.len(), v.len())?;
        Ok(self.value_unchecked(v))
    }

    pub(crate) fn value_unchecked(&self, v: &DVector<f64>) -> f64 {
        (0..self.len()).map(|i| self.weights[i] * self.laws[i].j(v[i])).sum()
    }

    /// `J⁰_h(y; z) = Σ w_i j⁰_i(y_i; z_i)`.
    pub fn j0(&self, y: &DVector<f64>, z: &DVector<f64>) -> Result<f64> {
        check_len("gamma_s base point", self.len(), y.len())?;
        check_len("gamma_s direction", self.len(), z.len())?;
        Ok((0..self.len())
            .map(|i| self.weights[i] * self.laws[i].j0(y[i], z[i]))
            .sum())
    }

    /// Largest per-node `c_J`.
    pub fn c_j(&self) -> f64 {
        self.laws.iter().map(FrictionLaw::one_sided_lipschitz).fold(0.0, f64::max)
    }

    /// `d_J = c_{j,1} |Γ_s|^{1/2}` bounding `|J⁰(y; z)| ≤ d_J ‖z‖_{L²(Γ_s)}` for bounded-gradient laws.
    pub fn d_j(&self) -> f64 {
        let c1 = self.laws.iter().map(|l| l.mu1).fold(0.0, f64::max);
        c1 * self.weights.sum().sqrt()
    }

    /// Kink weights `w_i μ₁` of the convex part.
    pub fn kink_weights(&self) -> DVector<f64> {
        DVector::from_iterator(self.len(), (0..self.len()).map(|i| self.weights[i] * self.laws[i].mu1))
    }

    /// Value of `Σ w_i h_i(v_i)`.
    pub fn concave_value(&self, v: &DVector<f64>) -> f64 {
        (0..self.len())
            .map(|i| self.weights[i] * self.laws[i].concave_part(v[i]))
            .sum()
    }

    /// Gradient of `Σ w_i h_i(v_i)`.
    pub fn concave_gradient(&self, v: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.len(),
            (0..self.len()).map(|i| self.weights[i] * self.laws[i].concave_part_derivative(v[i])),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn law() -> FrictionLaw {
        FrictionLaw::new(2.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn intervals_at_reference_points() {
        let l = law();
        assert_eq!(l.clarke_interval(0.0), ClarkeInterval { lo: -2.0, hi: 2.0 });
        let c = l.clarke_interval(1.0);
        assert!((c.lo - (1.0 + (-1.0f64).exp())).abs() < 1e-15);
        assert_eq!(c.lo, c.hi);
        assert!((l.clarke_interval(60.0).hi - 1.0).abs() < 1e-15);
        assert_eq!(l.j0(0.0, 1.0), 2.0);
        assert_eq!(l.j0(0.0, -1.0), 2.0);
        assert!((l.j0(1.0, -3.0) + 3.0 * (1.0 + (-1.0f64).exp())).abs() < 1e-14);
    }

    #[test]
    fn lumped_j0_hand_value() {
        let j = BoundaryFunctional::homogeneous(law(), DVector::from_vec(vec![0.5, 0.5])).unwrap();
        let y = DVector::from_vec(vec![0.0, 1.0]);
        let z = DVector::from_vec(vec![1.0, -1.0]);
        let expected = 0.5 * 2.0 - 0.5 * (1.0 + (-1.0f64).exp());
        assert!((j.j0(&y, &z).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.3161).abs() < 1e-4);
    }

    #[test]
    fn rejects_nonincreasing_bounds() {
        assert!(FrictionLaw::new(1.0, 1.0, 1.0).is_err());
        assert!(FrictionLaw::new(1.0, 2.0, 1.0).is_err());
        assert!(FrictionLaw::new(2.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn concave_split_reassembles_j() {
        let l = law();
        for &x in &[-3.0, -0.2, 0.0, 0.7, 5.0] {
            assert!((l.mu1 * f64::abs(x) + l.concave_part(x) - l.j(x)).abs() < 1e-14);
        }
    }
}
