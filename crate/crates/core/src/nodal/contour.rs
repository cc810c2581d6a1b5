use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::components::{count_sign_components, Connectivity, DisjointSets};
use super::field::ScalarField2D;
use crate::error::{Error, Result};

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EndpointClass {
    FreeSurface,
    Bottom,
    OuterBoundary,
    InnerBoundary,
    /// The mirror line of a half-domain computation.
    SymmetryAxis,
    DomainInteriorViolation,
}

/// Polyline through the zero set of the piecewise-linear interpolant.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodalCurve {
    pub vertices: Vec<Point>,
    pub closed: bool,
    /// Endpoint tags (`None` until classified, and always for closed curves).
    pub start: Option<EndpointClass>,
    pub end: Option<EndpointClass>,
}

impl NodalCurve {
    pub fn first(&self) -> Point {
        self.vertices[0]
    }

    pub fn last(&self) -> Point {
        *self.vertices.last().expect("curves have vertices")
    }

    pub fn length(&self) -> f64 {
        self.vertices.windows(2).map(|w| dist(w[0], w[1])).sum()
    }

    /// Endpoint tags as a sorted pair, for order-independent comparison.
    pub fn endpoint_classes(&self) -> Option<(EndpointClass, EndpointClass)> {
        let (a, b) = (self.start?, self.end?);
        Some(if (a as u8) <= (b as u8) { (a, b) } else { (b, a) })
    }

    pub fn touches(&self, class: EndpointClass) -> bool {
        self.start == Some(class) || self.end == Some(class)
    }

    pub fn both_ends(&self, class: EndpointClass) -> bool {
        self.start == Some(class) && self.end == Some(class)
    }

    /// Distance from `p` to the polyline.
    pub fn distance_to(&self, p: Point) -> f64 {
        if self.vertices.len() == 1 {
            return dist(p, self.vertices[0]);
        }
        self.vertices.windows(2).map(|w| point_segment_distance(p, w[0], w[1])).fold(f64::INFINITY, f64::min)
    }

    pub fn reversed(mut self) -> Self {
        self.vertices.reverse();
        std::mem::swap(&mut self.start, &mut self.end);
        self
    }
}

pub(crate) fn dist(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

pub(crate) fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    if len2 == 0.0 {
        return dist(p, a);
    }
    let t = (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0);
    dist(p, [a[0] + t * d[0], a[1] + t * d[1]])
}

/// Grid edge identifier: horizontal `(i,j)–(i+1,j)` is even, vertical
/// `(i,j)–(i,j+1)` is odd.
type EdgeId = usize;

struct Segment {
    edges: [EdgeId; 2],
    points: [Point; 2],
}

/// Marching-squares segments of the zero set, over cells whose four
/// corners are active. Zero-band samples are treated as `+0`; saddle cells
/// are resolved by the sign of the cell-centre average.
fn segments(field: &ScalarField2D) -> Vec<Segment> {
    let threshold = field.threshold();
    let nx = field.nx;
    let val = |i: usize, j: usize| {
        let v = field.value(i, j);
        if v.abs() <= threshold {
            0.0
        } else {
            v
        }
    };
    let h_edge = |i: usize, j: usize| 2 * (j * nx + i);
    let v_edge = |i: usize, j: usize| 2 * (j * nx + i) + 1;
    let crossing = |pa: Point, pb: Point, va: f64, vb: f64| {
        let t = va / (va - vb);
        [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])]
    };
    let mut out = Vec::new();
    for j in 0..field.ny - 1 {
        for i in 0..nx - 1 {
            if !(field.active(i, j) && field.active(i + 1, j) && field.active(i + 1, j + 1) && field.active(i, j + 1)) {
                continue;
            }
            // corners counter-clockwise from lower left
            let c = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let v = c.map(|(a, b)| val(a, b));
            let pos = v.map(|x| x >= 0.0);
            // edges: bottom (0–1), right (1–2), top (3–2), left (0–3)
            let edge_ids = [h_edge(i, j), v_edge(i + 1, j), h_edge(i, j + 1), v_edge(i, j)];
            let ends = [(0, 1), (1, 2), (3, 2), (0, 3)];
            let mut crossed: Vec<(EdgeId, Point)> = Vec::with_capacity(4);
            for (e, &(a, b)) in ends.iter().enumerate() {
                if pos[a] != pos[b] {
                    let (pa, pb) = (field.point(c[a].0, c[a].1), field.point(c[b].0, c[b].1));
                    crossed.push((edge_ids[e], crossing(pa, pb, v[a], v[b])));
                }
            }
            match crossed.len() {
                2 => out.push(Segment { edges: [crossed[0].0, crossed[1].0], points: [crossed[0].1, crossed[1].1] }),
                4 => {
                    // saddle: crossed = [bottom, right, top, left]
                    let centre_pos = v.iter().sum::<f64>() >= 0.0;
                    let pairs = if centre_pos == pos[0] {
                        // corners 0 and 2 connect through the centre; cut off 1 and 3
                        [(0, 1), (2, 3)]
                    } else {
                        [(0, 3), (1, 2)]
                    };
                    for (a, b) in pairs {
                        out.push(Segment { edges: [crossed[a].0, crossed[b].0], points: [crossed[a].1, crossed[b].1] });
                    }
                }
                _ => {}
            }
        }
    }
    out
}

/// Cells whose four corners alternate in sign (marching-squares saddles).
pub fn saddle_cells(field: &ScalarField2D) -> Vec<Point> {
    let threshold = field.threshold();
    let mut out = Vec::new();
    for j in 0..field.ny - 1 {
        for i in 0..field.nx - 1 {
            let c = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            if !c.iter().all(|&(a, b)| field.active(a, b)) {
                continue;
            }
            let s = c.map(|(a, b)| field.value(a, b).abs() > threshold && field.value(a, b) > 0.0);
            if s[0] == s[2] && s[1] == s[3] && s[0] != s[1] {
                let p = field.point(i, j);
                out.push([p[0] + 0.5 * field.h, p[1] + 0.5 * field.h]);
            }
        }
    }
    out
}

/// Chain marching-squares segments into maximal polylines.
pub fn extract_zero_curves(field: &ScalarField2D) -> Vec<NodalCurve> {
    let segs = segments(field);
    let mut by_edge: HashMap<EdgeId, Vec<usize>> = HashMap::with_capacity(2 * segs.len());
    for (k, s) in segs.iter().enumerate() {
        for e in s.edges {
            by_edge.entry(e).or_default().push(k);
        }
    }
    let mut used = vec![false; segs.len()];
    let mut curves = Vec::new();

    let walk = |start_seg: usize, start_edge: EdgeId, used: &mut Vec<bool>| -> (Vec<Point>, bool) {
        let mut vertices = Vec::new();
        let mut seg = start_seg;
        let mut entry = start_edge;
        let s0 = &segs[seg];
        vertices.push(if s0.edges[0] == entry { s0.points[0] } else { s0.points[1] });
        loop {
            used[seg] = true;
            let s = &segs[seg];
            let (exit, p) = if s.edges[0] == entry { (s.edges[1], s.points[1]) } else { (s.edges[0], s.points[0]) };
            vertices.push(p);
            let next = by_edge[&exit].iter().copied().find(|&n| n != seg && !used[n]);
            match next {
                Some(n) => {
                    seg = n;
                    entry = exit;
                }
                None => {
                    let closed = exit == start_edge && by_edge[&exit].len() == 2;
                    return (vertices, closed);
                }
            }
        }
    };

    // Open chains start at edges used by a single segment.
    let mut open_starts: Vec<(EdgeId, usize)> =
        by_edge.iter().filter(|(_, v)| v.len() == 1).map(|(&e, v)| (e, v[0])).collect();
    open_starts.sort_unstable();
    for (edge, seg) in open_starts {
        if used[seg] {
            continue;
        }
        let (vertices, _) = walk(seg, edge, &mut used);
        curves.push(NodalCurve { vertices, closed: false, start: None, end: None });
    }
    for seg in 0..segs.len() {
        if used[seg] {
            continue;
        }
        let (mut vertices, closed) = walk(seg, segs[seg].edges[0], &mut used);
        if closed {
            let first = vertices[0];
            *vertices.last_mut().unwrap() = first;
        }
        curves.push(NodalCurve { vertices, closed, start: None, end: None });
    }
    curves
}

/// Where a domain's boundary lies, and what each part of it is called.
pub trait BoundaryModel {
    /// Nearest boundary feature to `p` and its distance.
    fn nearest(&self, p: Point) -> (EndpointClass, f64);
}

/// Axis-aligned rectangle with a tag per side.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TaggedRect {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub left: EndpointClass,
    pub right: EndpointClass,
    pub bottom: EndpointClass,
    pub top: EndpointClass,
}

impl TaggedRect {
    pub fn uniform(x: [f64; 2], y: [f64; 2], class: EndpointClass) -> Self {
        TaggedRect { x, y, left: class, right: class, bottom: class, top: class }
    }
}

impl BoundaryModel for TaggedRect {
    fn nearest(&self, p: Point) -> (EndpointClass, f64) {
        [
            (self.left, (p[0] - self.x[0]).abs()),
            (self.right, (p[0] - self.x[1]).abs()),
            (self.bottom, (p[1] - self.y[0]).abs()),
            (self.top, (p[1] - self.y[1]).abs()),
        ]
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("four sides")
    }
}

fn tag(p: Point, boundary: &impl BoundaryModel, tol: f64) -> std::result::Result<EndpointClass, Point> {
    let (class, d) = boundary.nearest(p);
    if d <= tol {
        Ok(class)
    } else {
        Err(p)
    }
}

/// Tag both endpoints of an open curve by the nearest boundary feature
/// within `tol`; an endpoint farther away is an under-resolution error.
pub fn classify_endpoints(curve: &NodalCurve, boundary: &impl BoundaryModel, tol: f64) -> Result<NodalCurve> {
    let mut out = curve.clone();
    if curve.closed {
        out.start = None;
        out.end = None;
        return Ok(out);
    }
    let under = |p: Point| Error::UnderResolved { x: p[0], y: p[1] };
    out.start = Some(tag(curve.first(), boundary, tol).map_err(under)?);
    out.end = Some(tag(curve.last(), boundary, tol).map_err(under)?);
    Ok(out)
}

/// Like [`classify_endpoints`], but interior terminations are tagged
/// [`EndpointClass::DomainInteriorViolation`] instead of failing.
pub fn classify_endpoints_lenient(curve: &NodalCurve, boundary: &impl BoundaryModel, tol: f64) -> NodalCurve {
    let mut out = curve.clone();
    if !curve.closed {
        let t = |p| tag(p, boundary, tol).unwrap_or(EndpointClass::DomainInteriorViolation);
        out.start = Some(t(curve.first()));
        out.end = Some(t(curve.last()));
    }
    out
}

/// Component counts from flood fill and from treating `curves` as
/// separators, for the consistency contract between the two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationCheck {
    pub flood_fill: usize,
    pub separated: usize,
}

impl SeparationCheck {
    pub fn consistent(&self) -> bool {
        self.flood_fill == self.separated
    }
}

fn segments_intersect(p: Point, q: Point, a: Point, b: Point, eps: f64) -> bool {
    let cross = |o: Point, u: Point, v: Point| (u[0] - o[0]) * (v[1] - o[1]) - (u[1] - o[1]) * (v[0] - o[0]);
    let d1 = cross(a, b, p);
    let d2 = cross(a, b, q);
    let d3 = cross(p, q, a);
    let d4 = cross(p, q, b);
    if ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) && ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps)) {
        return true;
    }
    // touching / collinear cases
    let on = |o: Point, u: Point, v: Point, d: f64| {
        d.abs() <= eps
            && v[0] >= o[0].min(u[0]) - eps
            && v[0] <= o[0].max(u[0]) + eps
            && v[1] >= o[1].min(u[1]) - eps
            && v[1] <= o[1].max(u[1]) + eps
    };
    on(a, b, p, d1) || on(a, b, q, d2) || on(p, q, a, d3) || on(p, q, b, d4)
}

/// Count regions of non-zero active samples linked by grid edges that no
/// curve crosses, and compare with the 4-connected flood fill.
pub fn separation_check(field: &ScalarField2D, curves: &[NodalCurve]) -> Result<SeparationCheck> {
    let flood = count_sign_components(field, Connectivity::Four)?;
    let (nx, ny, h) = (field.nx, field.ny, field.h);
    let threshold = field.threshold();
    // bucket polyline segments by grid cell of their midpoint
    let mut buckets: HashMap<(isize, isize), Vec<(Point, Point)>> = HashMap::new();
    for c in curves {
        for w in c.vertices.windows(2) {
            let m = [0.5 * (w[0][0] + w[1][0]), 0.5 * (w[0][1] + w[1][1])];
            let key = (((m[0] - field.origin[0]) / h).floor() as isize, ((m[1] - field.origin[1]) / h).floor() as isize);
            buckets.entry(key).or_default().push((w[0], w[1]));
        }
    }
    let eps = 1e-12 * h * h;
    let blocked = |a: (usize, usize), b: (usize, usize)| {
        let (pa, pb) = (field.point(a.0, a.1), field.point(b.0, b.1));
        let (ci, cj) = (a.0.min(b.0) as isize, a.1.min(b.1) as isize);
        for di in -1..=1 {
            for dj in -1..=1 {
                if let Some(list) = buckets.get(&(ci + di, cj + dj)) {
                    if list.iter().any(|&(p, q)| segments_intersect(p, q, pa, pb, eps)) {
                        return true;
                    }
                }
            }
        }
        false
    };
    let nonzero = |i: usize, j: usize| field.sign_with(i, j, threshold) != 0;
    let mut sets = DisjointSets::new(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            if !nonzero(i, j) {
                continue;
            }
            if i + 1 < nx && nonzero(i + 1, j) && !blocked((i, j), (i + 1, j)) {
                sets.union(field.index(i, j), field.index(i + 1, j));
            }
            if j + 1 < ny && nonzero(i, j + 1) && !blocked((i, j), (i, j + 1)) {
                sets.union(field.index(i, j), field.index(i, j + 1));
            }
        }
    }
    let mut roots: Vec<usize> = (0..ny)
        .flat_map(|j| (0..nx).map(move |i| (i, j)))
        .filter(|&(i, j)| nonzero(i, j))
        .map(|(i, j)| sets.find(field.index(i, j)))
        .collect();
    roots.sort_unstable();
    roots.dedup();
    Ok(SeparationCheck { flood_fill: flood.components, separated: roots.len() })
}

/// Symmetric Hausdorff distance between two curve families (vertex to
/// polyline, both directions).
pub fn hausdorff_distance(a: &[NodalCurve], b: &[NodalCurve]) -> f64 {
    let one_way = |from: &[NodalCurve], to: &[NodalCurve]| {
        from.iter()
            .flat_map(|c| c.vertices.iter())
            .map(|&p| to.iter().map(|c| c.distance_to(p)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Even–odd point-in-polygon test.
pub fn point_in_polygon(p: Point, polygon: &[Point]) -> bool {
    let mut inside = false;
    let n = polygon.len();
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (polygon[i], polygon[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) && p[0] < (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0] {
            inside = !inside;
        }
        j = i;
    }
    inside
}
