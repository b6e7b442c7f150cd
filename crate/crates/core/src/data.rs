//! Scalar data fields for loads `f` (on Ω) and `q` (on Γ).

use nalgebra::Point2;
use serde::{Deserialize, Serialize};

/// Gaussian bump `amplitude · exp(-|x - centre|² / width²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub amplitude: f64,
    pub centre: [f64; 2],
    pub width: f64,
}

/// `constant + gradient·x + Σ bumps`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ScalarField {
    pub constant: f64,
    pub gradient: [f64; 2],
    pub bumps: Vec<Bump>,
}

impl ScalarField {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        ScalarField {
            constant: c,
            ..Self::default()
        }
    }

    pub fn affine(c: f64, gx: f64, gy: f64) -> Self {
        ScalarField {
            constant: c,
            gradient: [gx, gy],
            bumps: Vec::new(),
        }
    }

    pub fn with_bump(mut self, amplitude: f64, centre: [f64; 2], width: f64) -> Self {
        self.bumps.push(Bump {
            amplitude,
            centre,
            width,
        });
        self
    }

    pub fn eval(&self, p: Point2<f64>) -> f64 {
        let mut v = self.constant + self.gradient[0] * p.x + self.gradient[1] * p.y;
        for b in &self.bumps {
            let dx = p.x - b.centre[0];
            let dy = p.y - b.centre[1];
            v += b.amplitude * (-(dx * dx + dy * dy) / (b.width * b.width)).exp();
        }
        v
    }

    pub fn is_finite(&self) -> bool {
        self.constant.is_finite()
            && self.gradient.iter().all(|g| g.is_finite())
            && self
                .bumps
                .iter()
                .all(|b| b.amplitude.is_finite() && b.width > 0.0 && b.centre.iter().all(|c| c.is_finite()))
    }
}
