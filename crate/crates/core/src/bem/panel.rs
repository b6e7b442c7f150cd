//! Closed-form integrals of the Laplace kernels over a straight panel.

use nalgebra::{Point2, Vector2};

#[derive(Debug, Clone, Copy)]
pub struct Panel {
    pub a: Point2<f64>,
    pub b: Point2<f64>,
    pub len: f64,
    pub tangent: Vector2<f64>,
    /// Outward normal for a counterclockwise boundary.
    pub normal: Vector2<f64>,
}

struct Local {
    xi: f64,
    eta: f64,
    ra2: f64,
    rb2: f64,
    theta: f64,
}

fn x_log(x: f64, r2: f64) -> f64 {
    if x == 0.0 || r2 == 0.0 {
        0.0
    } else {
        x * r2.ln()
    }
}

impl Panel {
    pub fn new(a: Point2<f64>, b: Point2<f64>) -> Self {
        let d = b - a;
        let len = d.norm();
        let tangent = d / len;
        Panel {
            a,
            b,
            len,
            tangent,
            normal: Vector2::new(tangent.y, -tangent.x),
        }
    }

    pub fn point(&self, s: f64) -> Point2<f64> {
        self.a + (self.b - self.a) * s
    }

    pub fn midpoint(&self) -> Point2<f64> {
        self.point(0.5)
    }

    fn local(&self, x: &Point2<f64>) -> Local {
        let d = x - self.a;
        let xi = d.dot(&self.tangent);
        let eta = d.dot(&self.normal);
        let l = self.len;
        let ra2 = xi * xi + eta * eta;
        let rb2 = (xi - l) * (xi - l) + eta * eta;
        let on_line = eta.abs() <= 1e-14 * l;
        let theta = if on_line {
            0.0
        } else {
            (eta * l).atan2(xi * xi - xi * l + eta * eta)
        };
        Local {
            xi,
            eta: if on_line { 0.0 } else { eta },
            ra2,
            rb2,
            theta,
        }
    }

    /// `∫_panel log|x - y| ds_y`.
    pub fn log_integral(&self, x: &Point2<f64>) -> f64 {
        let c = self.local(x);
        0.5 * (x_log(c.xi, c.ra2) - x_log(c.xi - self.len, c.rb2)) - self.len + c.eta * c.theta
    }

    /// `∫_panel (x - y)·n_y / |x - y|² φ(y) ds_y` for the two hat functions of
    /// the panel (first: 1 at `a`, second: 1 at `b`).
    pub fn double_layer_hats(&self, x: &Point2<f64>) -> [f64; 2] {
        let c = self.local(x);
        let i0 = c.theta;
        let i1 = if c.eta == 0.0 || c.ra2 == 0.0 || c.rb2 == 0.0 {
            c.xi * i0
        } else {
            c.xi * i0 - 0.5 * c.eta * (c.ra2 / c.rb2).ln()
        };
        let i1 = i1 / self.len;
        [i0 - i1, i1]
    }

    /// Same kernel against the constant density.
    pub fn double_layer_const(&self, x: &Point2<f64>) -> f64 {
        self.local(x).theta
    }
}
