use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::{Point2, Vector2};

use super::polygon::BoundaryPart;
use crate::error::{Error, Result};

/// A labeled boundary edge, oriented so that the domain lies to its left.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub a: usize,
    pub b: usize,
    pub part: BoundaryPart,
}

/// Conforming P1 triangulation with counterclockwise triangles.
#[derive(Debug, Clone)]
pub struct Mesh2D {
    pub nodes: Vec<Point2<f64>>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    /// Largest element diameter.
    pub h: f64,
}

fn tri_area(p: &[Point2<f64>], t: &[usize; 3]) -> f64 {
    let (a, b, c) = (p[t[0]], p[t[1]], p[t[2]]);
    0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x))
}

impl Mesh2D {
    /// Validates and normalizes a mesh: triangles are reoriented
    /// counterclockwise and boundary edges are reoriented to follow them.
    pub fn new(
        nodes: Vec<Point2<f64>>,
        mut triangles: Vec<[usize; 3]>,
        boundary_edges: Vec<BoundaryEdge>,
    ) -> Result<Self> {
        let n = nodes.len();
        if triangles.is_empty() {
            return Err(Error::InvalidMesh("no triangles".into()));
        }
        for t in triangles.iter_mut() {
            if t.iter().any(|&i| i >= n) {
                return Err(Error::InvalidMesh(format!("triangle {t:?} indexes past {n} nodes")));
            }
            let a = tri_area(&nodes, t);
            if a == 0.0 || !a.is_finite() {
                return Err(Error::InvalidMesh(format!("triangle {t:?} has zero area")));
            }
            if a < 0.0 {
                t.swap(1, 2);
            }
        }
        let mut count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut directed: BTreeMap<(usize, usize), ()> = BTreeMap::new();
        for t in &triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                if directed.insert((a, b), ()).is_some() {
                    return Err(Error::InvalidMesh(format!("edge ({a}, {b}) used twice in one direction")));
                }
                *count.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        let free: Vec<(usize, usize)> = count
            .iter()
            .filter(|(_, &c)| c == 1)
            .map(|(&e, _)| e)
            .collect();
        if free.len() != boundary_edges.len() {
            return Err(Error::InvalidMesh(format!(
                "{} free edges but {} labeled boundary edges",
                free.len(),
                boundary_edges.len()
            )));
        }
        let mut fixed = Vec::with_capacity(boundary_edges.len());
        for e in boundary_edges {
            match count.get(&(e.a.min(e.b), e.a.max(e.b))) {
                Some(1) => {}
                _ => {
                    return Err(Error::InvalidMesh(format!(
                        "labeled edge ({}, {}) is not on the boundary",
                        e.a, e.b
                    )))
                }
            }
            if directed.contains_key(&(e.a, e.b)) {
                fixed.push(e);
            } else {
                fixed.push(BoundaryEdge { a: e.b, b: e.a, part: e.part });
            }
        }
        let h = triangles
            .iter()
            .map(|t| {
                let (a, b, c) = (nodes[t[0]], nodes[t[1]], nodes[t[2]]);
                (b - a).norm().max((c - b).norm()).max((a - c).norm())
            })
            .fold(0.0, f64::max);
        Ok(Mesh2D {
            nodes,
            triangles,
            boundary_edges: fixed,
            h,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn triangle_area(&self, k: usize) -> f64 {
        tri_area(&self.nodes, &self.triangles[k])
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|k| self.triangle_area(k)).sum()
    }

    pub fn centroid(&self) -> Point2<f64> {
        let mut c = Vector2::zeros();
        let mut area = 0.0;
        for (k, t) in self.triangles.iter().enumerate() {
            let a = self.triangle_area(k);
            let m = (self.nodes[t[0]].coords + self.nodes[t[1]].coords + self.nodes[t[2]].coords) / 3.0;
            c += m * a;
            area += a;
        }
        Point2::from(c / area)
    }

    /// Outward unit normal of a boundary edge.
    pub fn outward_normal(&self, e: &BoundaryEdge) -> Vector2<f64> {
        let d = self.nodes[e.b] - self.nodes[e.a];
        Vector2::new(d.y, -d.x) / d.norm()
    }

    pub fn edge_length(&self, e: &BoundaryEdge) -> f64 {
        (self.nodes[e.b] - self.nodes[e.a]).norm()
    }

    pub fn perimeter_of(&self, part: BoundaryPart) -> f64 {
        self.boundary_edges
            .iter()
            .filter(|e| e.part == part)
            .map(|e| self.edge_length(e))
            .sum()
    }

    /// Largest distance between two boundary nodes.
    pub fn diameter(&self) -> f64 {
        let b: Vec<usize> = self.boundary_edges.iter().map(|e| e.a).collect();
        let mut d: f64 = 0.0;
        for (i, &p) in b.iter().enumerate() {
            for &q in &b[i + 1..] {
                d = d.max((self.nodes[p] - self.nodes[q]).norm());
            }
        }
        d
    }

    pub fn scaled(&self, s: f64) -> Mesh2D {
        Mesh2D {
            nodes: self.nodes.iter().map(|p| Point2::from(p.coords * s)).collect(),
            triangles: self.triangles.clone(),
            boundary_edges: self.boundary_edges.clone(),
            h: self.h * s,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "nodes {} triangles {} bedges {}",
            self.nodes.len(),
            self.triangles.len(),
            self.boundary_edges.len()
        );
        for p in &self.nodes {
            let _ = writeln!(s, "{:.17e} {:.17e}", p.x, p.y);
        }
        for t in &self.triangles {
            let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
        }
        for e in &self.boundary_edges {
            let _ = writeln!(s, "{} {} {}", e.a, e.b, e.part);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Mesh2D> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 6 || h[0] != "nodes" || h[2] != "triangles" || h[4] != "bedges" {
            return Err(Error::Parse(format!("bad header `{header}`")));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|e| Error::Parse(format!("`{s}`: {e}")));
        let (nn, nt, ne) = (num(h[1])?, num(h[3])?, num(h[5])?);
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| Error::Parse(format!("unexpected end of input reading {what}")))
        };
        let mut nodes = Vec::with_capacity(nn);
        for _ in 0..nn {
            let l = next("nodes")?;
            let v: Vec<f64> = l
                .split_whitespace()
                .map(|s| s.parse::<f64>().map_err(|e| Error::Parse(format!("`{s}`: {e}"))))
                .collect::<Result<_>>()?;
            if v.len() != 2 {
                return Err(Error::Parse(format!("node line `{l}`")));
            }
            nodes.push(Point2::new(v[0], v[1]));
        }
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let l = next("triangles")?;
            let v: Vec<usize> = l.split_whitespace().map(num).collect::<Result<_>>()?;
            if v.len() != 3 {
                return Err(Error::Parse(format!("triangle line `{l}`")));
            }
            triangles.push([v[0], v[1], v[2]]);
        }
        let mut edges = Vec::with_capacity(ne);
        for _ in 0..ne {
            let l = next("boundary edges")?;
            let v: Vec<&str> = l.split_whitespace().collect();
            if v.len() != 3 {
                return Err(Error::Parse(format!("edge line `{l}`")));
            }
            let part = match v[2] {
                "S" => BoundaryPart::S,
                "T" => BoundaryPart::T,
                other => return Err(Error::Parse(format!("edge label `{other}`"))),
            };
            edges.push(BoundaryEdge {
                a: num(v[0])?,
                b: num(v[1])?,
                part,
            });
        }
        Mesh2D::new(nodes, triangles, edges)
    }
}
