//! Constrained Delaunay mesher for simple polygons.
//!
//! The subdivided boundary is ear-clipped, made Delaunay by edge flips that
//! never cross the boundary, and then interior points from a triangular lattice
//! are inserted one by one (Bowyer–Watson, with cavities that stop at boundary
//! segments). No super-triangle is involved, so non-convex outlines work as
//! long as every interior point is well inside the polygon.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{Point2, Vector2};

use super::polygon::{BoundaryPart, PolygonSpec};
use crate::error::{Error, Result};

pub(crate) struct RawMesh {
    pub nodes: Vec<Point2<f64>>,
    pub triangles: Vec<[usize; 3]>,
    /// `(a, b, part)` with `a -> b` along the counterclockwise boundary.
    pub segments: Vec<(usize, usize, BoundaryPart)>,
}

fn orient(a: &Point2<f64>, b: &Point2<f64>, c: &Point2<f64>) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Positive when `d` lies inside the circumcircle of the counterclockwise `abc`.
fn incircle(a: &Point2<f64>, b: &Point2<f64>, c: &Point2<f64>, d: &Point2<f64>) -> f64 {
    let (adx, ady) = (a.x - d.x, a.y - d.y);
    let (bdx, bdy) = (b.x - d.x, b.y - d.y);
    let (cdx, cdy) = (c.x - d.x, c.y - d.y);
    let ad = adx * adx + ady * ady;
    let bd = bdx * bdx + bdy * bdy;
    let cd = cdx * cdx + cdy * cdy;
    adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx)
}

struct Triangulation {
    pts: Vec<Point2<f64>>,
    tris: Vec<Option<[usize; 3]>>,
    /// Directed edge -> triangle holding it counterclockwise.
    edges: BTreeMap<(usize, usize), usize>,
    constrained: BTreeSet<(usize, usize)>,
    tol_orient: f64,
    tol_circle: f64,
}

impl Triangulation {
    fn add(&mut self, t: [usize; 3]) -> usize {
        let id = self.tris.len();
        for k in 0..3 {
            self.edges.insert((t[k], t[(k + 1) % 3]), id);
        }
        self.tris.push(Some(t));
        id
    }

    fn remove(&mut self, id: usize) {
        if let Some(t) = self.tris[id].take() {
            for k in 0..3 {
                let e = (t[k], t[(k + 1) % 3]);
                if self.edges.get(&e) == Some(&id) {
                    self.edges.remove(&e);
                }
            }
        }
    }

    fn is_constrained(&self, a: usize, b: usize) -> bool {
        self.constrained.contains(&(a, b)) || self.constrained.contains(&(b, a))
    }

    fn neighbor(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.get(&(b, a)).copied()
    }

    fn in_circle(&self, t: [usize; 3], p: &Point2<f64>) -> bool {
        incircle(&self.pts[t[0]], &self.pts[t[1]], &self.pts[t[2]], p) > self.tol_circle
    }

    /// Lawson flips until every unconstrained edge is locally Delaunay.
    fn make_delaunay(&mut self) {
        let mut stack: Vec<(usize, usize)> = self.edges.keys().copied().collect();
        let mut guard = 0usize;
        while let Some((a, b)) = stack.pop() {
            guard += 1;
            if guard > 1_000_000 {
                break;
            }
            if self.is_constrained(a, b) {
                continue;
            }
            let (Some(&t1), Some(&t2)) = (self.edges.get(&(a, b)), self.edges.get(&(b, a))) else {
                continue;
            };
            let (Some(tri1), Some(tri2)) = (self.tris[t1], self.tris[t2]) else {
                continue;
            };
            let c = opposite(tri1, a, b);
            let d = opposite(tri2, b, a);
            let p = &self.pts;
            if !self.in_circle([a, b, c], &p[d].clone()) {
                continue;
            }
            // Flip ab -> cd; requires the quad a, d, b, c to be strictly convex.
            if orient(&p[c], &p[a], &p[d]) <= self.tol_orient
                || orient(&p[d], &p[b], &p[c]) <= self.tol_orient
            {
                continue;
            }
            self.remove(t1);
            self.remove(t2);
            self.add([c, a, d]);
            self.add([d, b, c]);
            stack.extend([(a, d), (d, b), (b, c), (c, a)]);
        }
    }

    fn locate(&self, p: &Point2<f64>) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (id, t) in self.tris.iter().enumerate() {
            let Some(t) = t else { continue };
            let m = (0..3)
                .map(|k| orient(&self.pts[t[k]], &self.pts[t[(k + 1) % 3]], p))
                .fold(f64::INFINITY, f64::min);
            if m >= -self.tol_orient && best.is_none_or(|(_, bm)| m > bm) {
                best = Some((id, m));
            }
        }
        best.map(|(id, _)| id)
    }

    fn insert(&mut self, p: Point2<f64>) -> Result<()> {
        let start = self
            .locate(&p)
            .ok_or_else(|| Error::Meshing(format!("point ({}, {}) lies outside", p.x, p.y)))?;
        let pid = self.pts.len();
        self.pts.push(p);

        let mut cavity: BTreeSet<usize> = BTreeSet::from([start]);
        let mut queue = vec![start];
        while let Some(id) = queue.pop() {
            let t = self.tris[id].expect("live triangle");
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                if self.is_constrained(a, b) {
                    continue;
                }
                if let Some(nb) = self.neighbor(a, b) {
                    if !cavity.contains(&nb) && self.in_circle(self.tris[nb].unwrap(), &p) {
                        cavity.insert(nb);
                        queue.push(nb);
                    }
                }
            }
        }

        // Shrink the cavity until it is strictly star-shaped from p.
        loop {
            let mut offender = None;
            'scan: for &id in &cavity {
                let t = self.tris[id].unwrap();
                for k in 0..3 {
                    let (a, b) = (t[k], t[(k + 1) % 3]);
                    let inner = self.neighbor(a, b).is_some_and(|nb| cavity.contains(&nb));
                    if !inner && orient(&self.pts[a], &self.pts[b], &p) <= self.tol_orient {
                        offender = Some(id);
                        break 'scan;
                    }
                }
            }
            match offender {
                None => break,
                Some(id) if id == start => {
                    return Err(Error::Meshing(format!(
                        "point ({}, {}) sits on a constrained segment",
                        p.x, p.y
                    )))
                }
                Some(id) => {
                    cavity.remove(&id);
                }
            }
        }

        let mut rim = Vec::new();
        for &id in &cavity {
            let t = self.tris[id].unwrap();
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                if !self.neighbor(a, b).is_some_and(|nb| cavity.contains(&nb)) {
                    rim.push((a, b));
                }
            }
        }
        let mut ids: Vec<usize> = cavity.into_iter().collect();
        ids.sort_unstable();
        for id in ids {
            self.remove(id);
        }
        for (a, b) in rim {
            self.add([a, b, pid]);
        }
        Ok(())
    }
}

fn opposite(t: [usize; 3], a: usize, b: usize) -> usize {
    t.into_iter().find(|&v| v != a && v != b).unwrap()
}

/// Ear clipping of a simple counterclockwise polygon given by point indices.
fn ear_clip(pts: &[Point2<f64>], tol: f64) -> Result<Vec<[usize; 3]>> {
    let mut ring: Vec<usize> = (0..pts.len()).collect();
    let mut out = Vec::with_capacity(pts.len().saturating_sub(2));
    while ring.len() > 3 {
        let m = ring.len();
        let mut best: Option<(usize, f64)> = None;
        for i in 0..m {
            let (p, c, n) = (ring[(i + m - 1) % m], ring[i], ring[(i + 1) % m]);
            let area = orient(&pts[p], &pts[c], &pts[n]);
            if area <= tol {
                continue;
            }
            let blocked = ring.iter().any(|&q| {
                q != p
                    && q != c
                    && q != n
                    && orient(&pts[p], &pts[c], &pts[q]) >= -tol
                    && orient(&pts[c], &pts[n], &pts[q]) >= -tol
                    && orient(&pts[n], &pts[p], &pts[q]) >= -tol
            });
            if blocked {
                continue;
            }
            // Prefer ears whose diagonal is short relative to the ear area.
            let d = (pts[n] - pts[p]).norm_squared();
            let quality = area / d;
            if best.is_none_or(|(_, q)| quality > q) {
                best = Some((i, quality));
            }
        }
        let (i, _) = best.ok_or_else(|| Error::Meshing("no ear found; polygon not simple".into()))?;
        let m = ring.len();
        out.push([ring[(i + m - 1) % m], ring[i], ring[(i + 1) % m]]);
        ring.remove(i);
    }
    if orient(&pts[ring[0]], &pts[ring[1]], &pts[ring[2]]) <= tol {
        return Err(Error::Meshing("degenerate final ear".into()));
    }
    out.push([ring[0], ring[1], ring[2]]);
    Ok(out)
}

/// Boundary nodes (counterclockwise, starting at vertex 0) and segment labels
/// for a nominal spacing.
fn subdivide_boundary(spec: &PolygonSpec, spacing: f64) -> (Vec<Point2<f64>>, Vec<BoundaryPart>) {
    let labels = spec.edge_labels();
    let n = spec.n_vertices();
    let mut pts = Vec::new();
    let mut parts = Vec::new();
    for (i, &label) in labels.iter().enumerate().take(n) {
        let (a, b) = (spec.vertices[i], spec.vertices[(i + 1) % n]);
        let m = ((b - a).norm() / spacing - 1e-9).ceil().max(1.0) as usize;
        for k in 0..m {
            pts.push(a + (b - a) * (k as f64 / m as f64));
            parts.push(label);
        }
    }
    (pts, parts)
}

fn lattice_points(spec: &PolygonSpec, spacing: f64, clearance: f64) -> Vec<Point2<f64>> {
    let (mut lo, mut hi) = (spec.vertices[0], spec.vertices[0]);
    for v in &spec.vertices {
        lo = Point2::new(lo.x.min(v.x), lo.y.min(v.y));
        hi = Point2::new(hi.x.max(v.x), hi.y.max(v.y));
    }
    let centre = Point2::new(0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y));
    let dy = spacing * 3f64.sqrt() / 2.0;
    let ny = ((hi.y - lo.y) / dy).ceil() as i64 + 1;
    let nx = ((hi.x - lo.x) / spacing).ceil() as i64 + 1;
    let mut out = Vec::new();
    for j in -ny..=ny {
        let shift = if j.rem_euclid(2) == 1 { 0.5 * spacing } else { 0.0 };
        for i in -nx..=nx {
            let p = centre + Vector2::new(i as f64 * spacing + shift, j as f64 * dy);
            if spec.contains(&p) && spec.distance_to_boundary(&p) >= clearance {
                out.push(p);
            }
        }
    }
    out
}

pub(crate) fn triangulate(spec: &PolygonSpec, spacing: f64) -> Result<RawMesh> {
    let (bpts, parts) = subdivide_boundary(spec, spacing);
    let nb = bpts.len();
    let scale = spec.perimeter();
    let tol_orient = 1e-13 * scale * scale;
    let ears = ear_clip(&bpts, tol_orient)?;

    let mut tri = Triangulation {
        pts: bpts,
        tris: Vec::new(),
        edges: BTreeMap::new(),
        constrained: (0..nb).map(|i| (i, (i + 1) % nb)).collect(),
        tol_orient,
        tol_circle: 1e-13 * scale.powi(4),
    };
    for t in ears {
        tri.add(t);
    }
    tri.make_delaunay();
    for p in lattice_points(spec, spacing, 0.5 * spacing) {
        tri.insert(p)?;
    }
    tri.make_delaunay();

    let triangles: Vec<[usize; 3]> = tri.tris.into_iter().flatten().collect();
    let segments = (0..nb).map(|i| (i, (i + 1) % nb, parts[i])).collect();
    Ok(RawMesh {
        nodes: tri.pts,
        triangles,
        segments,
    })
}
