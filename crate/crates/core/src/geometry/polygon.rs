use nalgebra::{Point2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which side of the boundary split an edge belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryPart {
    /// Contact part carrying the nonmonotone law and the jump unknown.
    S,
    /// Transmission part with continuous traces.
    T,
}

impl BoundaryPart {
    pub fn label(self) -> &'static str {
        match self {
            BoundaryPart::S => "S",
            BoundaryPart::T => "T",
        }
    }
}

impl std::fmt::Display for BoundaryPart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Counterclockwise simple polygon with marked contact arcs.
///
/// An arc `(s, e)` covers the polygon edges `s, s+1, ..., e-1` (cyclically),
/// i.e. it runs from vertex `s` to vertex `e` along the positive orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonSpec {
    pub vertices: Vec<Point2<f64>>,
    pub gamma_s_arcs: Vec<(usize, usize)>,
}

impl PolygonSpec {
    pub fn new(vertices: Vec<Point2<f64>>, gamma_s_arcs: Vec<(usize, usize)>) -> Result<Self> {
        let spec = PolygonSpec {
            vertices,
            gamma_s_arcs,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Axis-aligned rectangle with lower-left corner `origin`; vertices in the
    /// order lower-left, lower-right, upper-right, upper-left.
    pub fn rectangle(
        origin: Point2<f64>,
        width: f64,
        height: f64,
        gamma_s_arcs: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let v = vec![
            origin,
            origin + Vector2::new(width, 0.0),
            origin + Vector2::new(width, height),
            origin + Vector2::new(0.0, height),
        ];
        Self::new(v, gamma_s_arcs)
    }

    /// Square of side `side` centred at the origin, contact on the bottom side.
    pub fn centered_square(side: f64) -> Result<Self> {
        let h = 0.5 * side;
        Self::rectangle(Point2::new(-h, -h), side, side, vec![(0, 1)])
    }

    /// Regular `n`-gon inscribed in the circle of radius `radius`, first vertex on
    /// the positive x-axis.
    pub fn regular(n: usize, radius: f64, gamma_s_arcs: Vec<(usize, usize)>) -> Result<Self> {
        let v = (0..n)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                Point2::new(radius * t.cos(), radius * t.sin())
            })
            .collect();
        Self::new(v, gamma_s_arcs)
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
                a.x * b.y - b.x * a.y
            })
            .sum::<f64>()
            * 0.5
    }

    pub fn perimeter(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| (self.vertices[(i + 1) % n] - self.vertices[i]).norm())
            .sum()
    }

    /// Label of polygon edge `i` (from vertex `i` to vertex `i+1`).
    pub fn edge_labels(&self) -> Vec<BoundaryPart> {
        let n = self.vertices.len();
        let mut labels = vec![BoundaryPart::T; n];
        for &(s, e) in &self.gamma_s_arcs {
            let mut k = s;
            loop {
                labels[k] = BoundaryPart::S;
                k = (k + 1) % n;
                if k == e {
                    break;
                }
            }
        }
        labels
    }

    pub fn contains(&self, p: &Point2<f64>) -> bool {
        let n = self.vertices.len();
        let mut inside = false;
        for i in 0..n {
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn distance_to_boundary(&self, p: &Point2<f64>) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| segment_distance(p, &self.vertices[i], &self.vertices[(i + 1) % n]))
            .fold(f64::INFINITY, f64::min)
    }

    fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        if n < 3 {
            return Err(Error::InvalidPolygon(format!("{n} vertices, need at least 3")));
        }
        if self.vertices.iter().any(|v| !v.x.is_finite() || !v.y.is_finite()) {
            return Err(Error::InvalidPolygon("non-finite vertex".into()));
        }
        let scale = self.perimeter();
        for i in 0..n {
            if (self.vertices[(i + 1) % n] - self.vertices[i]).norm() <= 1e-12 * scale {
                return Err(Error::InvalidPolygon(format!("edge {i} has zero length")));
            }
        }
        if self.signed_area() <= 1e-12 * scale * scale {
            return Err(Error::InvalidPolygon(
                "vertices must be counterclockwise with positive area".into(),
            ));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    continue;
                }
                let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
                let (c, d) = (self.vertices[j], self.vertices[(j + 1) % n]);
                if segments_intersect(&a, &b, &c, &d) {
                    return Err(Error::InvalidPolygon(format!("edges {i} and {j} intersect")));
                }
            }
        }
        if self.gamma_s_arcs.is_empty() {
            return Err(Error::InvalidPolygon("gamma_s must be nonempty".into()));
        }
        let mut covered = vec![false; n];
        for &(s, e) in &self.gamma_s_arcs {
            if s >= n || e >= n || s == e {
                return Err(Error::InvalidPolygon(format!("bad gamma_s arc ({s}, {e})")));
            }
            let mut k = s;
            while k != e {
                if covered[k] {
                    return Err(Error::InvalidPolygon("gamma_s arcs overlap".into()));
                }
                covered[k] = true;
                k = (k + 1) % n;
            }
        }
        if covered.iter().all(|&c| c) {
            return Err(Error::InvalidPolygon("gamma_t must be nonempty".into()));
        }
        Ok(())
    }
}

pub(crate) fn segment_distance(p: &Point2<f64>, a: &Point2<f64>, b: &Point2<f64>) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

fn cross(u: &Vector2<f64>, v: &Vector2<f64>) -> f64 {
    u.x * v.y - u.y * v.x
}

fn segments_intersect(a: &Point2<f64>, b: &Point2<f64>, c: &Point2<f64>, d: &Point2<f64>) -> bool {
    let d1 = cross(&(b - a), &(c - a));
    let d2 = cross(&(b - a), &(d - a));
    let d3 = cross(&(d - c), &(a - c));
    let d4 = cross(&(d - c), &(b - c));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |p: &Point2<f64>, q: &Point2<f64>, r: &Point2<f64>, o: f64| {
        o == 0.0
            && r.x >= p.x.min(q.x)
            && r.x <= p.x.max(q.x)
            && r.y >= p.y.min(q.y)
            && r.y <= p.y.max(q.y)
    };
    on(a, b, c, d1) || on(a, b, d, d2) || on(c, d, a, d3) || on(c, d, b, d4)
}
