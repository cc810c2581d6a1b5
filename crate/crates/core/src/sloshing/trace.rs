use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{grad_u, grad_v, uv_unchecked, SloshingParams};
use crate::error::{domain, Result};
use crate::nodal::{
    classify_endpoints_lenient, dist, extract_zero_curves, point_in_polygon, BoundaryModel, EndpointClass,
    NodalCurve, Point, ScalarField2D, EPS_NUMERICAL,
};
use crate::report::ExperimentReport;

use EndpointClass::{FreeSurface, OuterBoundary, SymmetryAxis};

/// Right-half tracing window `(0, x_max) × (−depth, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceWindow {
    pub x_max: f64,
    pub depth: f64,
}

impl Default for TraceWindow {
    fn default() -> Self {
        TraceWindow { x_max: 4.0 * PI, depth: 2.0 * PI }
    }
}

impl TraceWindow {
    /// Grid spacing and row count for `nx` columns.
    pub fn grid(&self, nx: usize) -> Result<(f64, usize)> {
        if !(self.x_max > 0.0) || !(self.depth > 0.0) {
            return domain("window extents must be positive");
        }
        if nx < 8 {
            return domain("need at least 8 columns");
        }
        let h = self.x_max / nx as f64;
        let ny = (self.depth / h).round() as usize;
        if ny < 2 {
            return domain("window too shallow for the grid spacing");
        }
        Ok((h, ny))
    }
}

/// Boundary features of the traced half-window: the free surface `y = 0`,
/// the symmetry axis `x = 0`, and the artificial window edges.
#[derive(Debug, Clone, Copy)]
pub struct SloshingBoundary {
    pub window: TraceWindow,
}

impl BoundaryModel for SloshingBoundary {
    fn nearest(&self, p: Point) -> (EndpointClass, f64) {
        let w = self.window;
        [
            (FreeSurface, (-p[1]).max(0.0)),
            (SymmetryAxis, p[0].abs()),
            (OuterBoundary, (w.x_max - p[0]).abs().min((p[1] + w.depth).abs())),
        ]
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("three features")
    }
}

/// `u` and `v` sampled at `x_i = (i + ½)h`, `y_j = −(j + 1)h`, so the top
/// row sits one step below the surface and the axis itself is not sampled.
pub fn sample_fields(params: SloshingParams, window: TraceWindow, nx: usize) -> Result<(ScalarField2D, ScalarField2D)> {
    let (h, ny) = window.grid(nx)?;
    let lambda = params.lambda();
    let origin = [0.5 * h, -(ny as f64) * h];
    let samples: Vec<(f64, f64)> = (0..nx * ny)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % nx, k / nx);
            uv_unchecked(origin[0] + i as f64 * h, origin[1] + j as f64 * h, lambda)
        })
        .collect();
    let (u, v): (Vec<f64>, Vec<f64>) = samples.into_iter().unzip();
    let mask = vec![true; nx * ny];
    Ok((
        ScalarField2D::new(origin, h, nx, ny, u, mask.clone())?.with_zero_band(EPS_NUMERICAL),
        ScalarField2D::new(origin, h, nx, ny, v, mask)?.with_zero_band(EPS_NUMERICAL),
    ))
}

/// Nodal-curve counts in the traced half and in the whole plane (a curve
/// meeting the axis joins its mirror image; any other curve has a distinct
/// image).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveInventory {
    pub right_half: usize,
    pub full_plane: usize,
}

fn inventory(curves: &[NodalCurve]) -> CurveInventory {
    CurveInventory {
        right_half: curves.len(),
        full_plane: curves.iter().map(|c| if c.touches(SymmetryAxis) { 1 } else { 2 }).sum(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub m: u32,
    pub lambda: f64,
    pub window: TraceWindow,
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub u_curves: Vec<NodalCurve>,
    pub v_curves: Vec<NodalCurve>,
    pub u_nodes: CurveInventory,
    pub v_nodes: CurveInventory,
    /// Index into `v_curves` of the chosen bottom `B`.
    pub bottom: Option<usize>,
    /// Surface abscissa where `B` meets the free surface.
    pub free_surface_extent: Option<f64>,
    /// Depth at which `B` meets the symmetry axis, if it does.
    pub bottom_axis_depth: Option<f64>,
    /// Index into `u_curves` of a node with both ends on the surface lying
    /// inside the region bounded by `B`.
    pub counterexample_curve: Option<usize>,
    /// `u`-curves not reaching the window edge.
    pub finite_u_nodes: Vec<usize>,
    /// Index into `v_curves` of the bottom meeting the surface farthest out.
    pub exterior_bottom: Option<usize>,
    pub finite_u_inside_exterior: Option<bool>,
    /// Max `|n·∇u| / |∇u|` along `B` (zero flux through the bottom).
    pub bottom_flux: Option<f64>,
    /// Max `|v|` along the traced polyline of `B`, relative to max `|v|` on the grid.
    pub bottom_trace_residual: Option<f64>,
    /// Max `|v(0, y)|` on the axis segment closing `W`.
    pub axis_streamline: Option<f64>,
    /// Endpoints that stopped inside the window.
    pub interior_endpoints: Vec<Point>,
}

/// Curve tolerance for endpoint snapping, in grid steps.
const SNAP: f64 = 1.5;

/// Extend an endpoint on the surface or the axis onto that line, along the
/// chord to a vertex about two steps back.
fn extend_endpoint(curve: &mut NodalCurve, h: f64, at_start: bool) {
    let class = if at_start { curve.start } else { curve.end };
    let n = curve.vertices.len();
    let order: Vec<usize> = if at_start { (0..n).collect() } else { (0..n).rev().collect() };
    let p0 = curve.vertices[order[0]];
    let anchor = order.iter().map(|&k| curve.vertices[k]).find(|&q| dist(q, p0) >= 2.0 * h).unwrap_or(curve.vertices[order[n - 1]]);
    let d = [p0[0] - anchor[0], p0[1] - anchor[1]];
    let target = match class {
        Some(FreeSurface) => {
            let t = if d[1] > 0.0 { -p0[1] / d[1] } else { f64::INFINITY };
            if t.is_finite() && t * d[0].hypot(d[1]) <= 3.0 * h {
                [p0[0] + t * d[0], 0.0]
            } else {
                [p0[0], 0.0]
            }
        }
        Some(SymmetryAxis) => {
            let t = if d[0] < 0.0 { -p0[0] / d[0] } else { f64::INFINITY };
            if t.is_finite() && t * d[0].hypot(d[1]) <= 3.0 * h {
                [0.0, p0[1] + t * d[1]]
            } else {
                [0.0, p0[1]]
            }
        }
        _ => return,
    };
    if at_start {
        curve.vertices.insert(0, target);
    } else {
        curve.vertices.push(target);
    }
}

fn trace_family(field: &ScalarField2D, window: TraceWindow) -> (Vec<NodalCurve>, Vec<Point>) {
    let boundary = SloshingBoundary { window };
    let mut interior = Vec::new();
    let mut curves: Vec<NodalCurve> = extract_zero_curves(field)
        .iter()
        .map(|c| classify_endpoints_lenient(c, &boundary, SNAP * field.h))
        .collect();
    for c in &mut curves {
        if c.closed {
            continue;
        }
        for (class, p) in [(c.start, c.first()), (c.end, c.last())] {
            if class == Some(EndpointClass::DomainInteriorViolation) {
                interior.push(p);
            }
        }
        extend_endpoint(c, field.h, true);
        extend_endpoint(c, field.h, false);
        // orient: surface end first
        if c.end == Some(FreeSurface) && c.start != Some(FreeSurface) {
            *c = c.clone().reversed();
        }
    }
    // deterministic order: by first vertex
    curves.sort_by(|a, b| a.first()[0].total_cmp(&b.first()[0]).then(a.first()[1].total_cmp(&b.first()[1])));
    (curves, interior)
}

/// Both ends on the free surface once mirrored: (surface, surface) or
/// (surface, axis).
fn surface_to_surface(c: &NodalCurve) -> bool {
    !c.closed && c.start == Some(FreeSurface) && matches!(c.end, Some(FreeSurface) | Some(SymmetryAxis))
}

/// Region `W` bounded by a bottom curve, the axis and the surface.
fn region_polygon(bottom: &NodalCurve) -> Vec<Point> {
    let mut poly = bottom.vertices.clone();
    if bottom.end == Some(SymmetryAxis) {
        poly.push([0.0, 0.0]);
    }
    poly
}

fn inside_region(curve: &NodalCurve, polygon: &[Point], h: f64) -> bool {
    let interior: Vec<&Point> = curve.vertices.iter().filter(|p| p[1] < -2.0 * h && p[0] > 2.0 * h).collect();
    !interior.is_empty() && interior.iter().all(|&&p| point_in_polygon(p, polygon))
}

/// Project a point onto `v = 0` by Newton steps along `∇v`.
fn project_to_streamline(mut p: Point, lambda: f64) -> Point {
    for _ in 0..4 {
        let v = uv_unchecked(p[0], p[1], lambda).1;
        let g = grad_v(p[0], p[1], lambda, 1e-5);
        let g2 = g[0] * g[0] + g[1] * g[1];
        if g2 == 0.0 {
            break;
        }
        p = [p[0] - v * g[0] / g2, p[1] - v * g[1] / g2];
    }
    p
}

/// Largest normalized flux `|n·∇u| / |∇u|` across a `v`-curve.
fn max_flux(curve: &NodalCurve, lambda: f64, h: f64) -> f64 {
    let pts: Vec<Point> = curve
        .vertices
        .par_iter()
        .filter(|p| p[1] < -2.0 * h && p[0] > 2.0 * h)
        .map(|&p| project_to_streamline(p, lambda))
        .collect();
    // drop near-duplicates so every stencil spans a usable arc
    let mut pts: Vec<Point> = pts.into_iter().fold(Vec::new(), |mut acc, p| {
        if acc.last().is_none_or(|&q| dist(p, q) > 0.25 * h) {
            acc.push(p);
        }
        acc
    });
    pts.dedup();
    pts.par_windows(3)
        .map(|w| {
            // tangent of the quadratic through three unevenly spaced points
            let (a, b) = (dist(w[0], w[1]), dist(w[1], w[2]));
            let c0 = -b / (a * (a + b));
            let c1 = (b - a) / (a * b);
            let c2 = a / (b * (a + b));
            let t = [c0 * w[0][0] + c1 * w[1][0] + c2 * w[2][0], c0 * w[0][1] + c1 * w[1][1] + c2 * w[2][1]];
            let len = t[0].hypot(t[1]);
            let n = [-t[1] / len, t[0] / len];
            let g = grad_u(w[1][0], w[1][1], lambda, 1e-5);
            (n[0] * g[0] + n[1] * g[1]).abs() / g[0].hypot(g[1])
        })
        .reduce(|| 0.0, f64::max)
}

/// Trace the nodal curves of `u` and `v` in the right half-window and look
/// for a `u`-node with both ends on the surface inside the region bounded
/// by a `v`-node.
pub fn trace_counterexample(params: SloshingParams, window: TraceWindow, nx: usize) -> Result<CounterexampleReport> {
    let (u_field, v_field) = sample_fields(params, window, nx)?;
    trace_sampled(params, window, &u_field, &v_field)
}

/// [`trace_counterexample`] on fields already produced by [`sample_fields`].
pub fn trace_sampled(
    params: SloshingParams,
    window: TraceWindow,
    u_field: &ScalarField2D,
    v_field: &ScalarField2D,
) -> Result<CounterexampleReport> {
    let h = u_field.h;
    let lambda = params.lambda();
    let (u_curves, mut interior) = trace_family(u_field, window);
    let (v_curves, v_interior) = trace_family(v_field, window);
    interior.extend(v_interior);

    let bottoms: Vec<usize> = (0..v_curves.len()).filter(|&k| surface_to_surface(&v_curves[k])).collect();
    let candidates: Vec<usize> = (0..u_curves.len()).filter(|&k| surface_to_surface(&u_curves[k])).collect();
    let mut pick = None;
    for &b in &bottoms {
        let poly = region_polygon(&v_curves[b]);
        if let Some(&c) = candidates.iter().find(|&&c| inside_region(&u_curves[c], &poly, h)) {
            pick = Some((b, c));
            break;
        }
    }
    let exterior_bottom = bottoms.iter().copied().max_by(|&a, &b| v_curves[a].first()[0].total_cmp(&v_curves[b].first()[0]));
    let bottom = pick.map(|(b, _)| b).or(exterior_bottom);
    let finite_u_nodes: Vec<usize> = (0..u_curves.len()).filter(|&k| !u_curves[k].touches(OuterBoundary)).collect();
    let finite_u_inside_exterior = exterior_bottom.map(|b| {
        let poly = region_polygon(&v_curves[b]);
        !finite_u_nodes.is_empty() && finite_u_nodes.iter().all(|&k| inside_region(&u_curves[k], &poly, h))
    });

    let v_max = v_field.max_abs();
    let (bottom_flux, bottom_trace_residual, axis_streamline, bottom_axis_depth) = match bottom {
        Some(b) => {
            let curve = &v_curves[b];
            let residual = curve
                .vertices
                .par_iter()
                .filter(|p| p[1] < -0.5 * h && p[0] > 0.25 * h)
                .map(|p| uv_unchecked(p[0], p[1], lambda).1.abs())
                .reduce(|| 0.0, f64::max)
                / v_max;
            let (axis, depth) = if curve.end == Some(SymmetryAxis) {
                let depth = curve.last()[1];
                let samples = 64;
                let m = (1..=samples)
                    .map(|i| uv_unchecked(0.0, depth * i as f64 / samples as f64, lambda).1.abs())
                    .fold(0.0, f64::max);
                (Some(m), Some(depth))
            } else {
                (None, None)
            };
            (Some(max_flux(curve, lambda, h)), Some(residual), axis, depth)
        }
        None => (None, None, None, None),
    };

    Ok(CounterexampleReport {
        m: params.m(),
        lambda,
        window,
        nx: u_field.nx,
        ny: u_field.ny,
        h,
        u_nodes: inventory(&u_curves),
        v_nodes: inventory(&v_curves),
        bottom,
        free_surface_extent: bottom.map(|b| v_curves[b].first()[0]),
        bottom_axis_depth,
        counterexample_curve: pick.map(|(_, c)| c),
        finite_u_nodes,
        exterior_bottom,
        finite_u_inside_exterior,
        bottom_flux,
        bottom_trace_residual,
        axis_streamline,
        interior_endpoints: interior,
        u_curves,
        v_curves,
    })
}

/// Tolerance on the normalized flux through the traced bottom.
pub const FLUX_TOLERANCE: f64 = 1e-3;
/// Tolerance on `|v|` along the raw traced bottom, relative to the field maximum.
pub const TRACE_TOLERANCE: f64 = 1e-2;

impl CounterexampleReport {
    pub fn kuttler_counterexample(&self) -> bool {
        self.counterexample_curve.is_some()
    }

    pub fn to_report(&self, refinement: Option<&RefinementCheck>) -> ExperimentReport {
        let mut r = ExperimentReport::new("sloshing");
        r.config("m", self.m)
            .config("lambda", self.lambda)
            .config("x_max", self.window.x_max)
            .config("depth", self.window.depth)
            .config("nx", self.nx)
            .config("ny", self.ny)
            .config("h", self.h);
        r.result("u_nodes", self.u_nodes)
            .result("v_nodes", self.v_nodes)
            .result("bottom", self.bottom)
            .result("free_surface_extent", self.free_surface_extent)
            .result("bottom_axis_depth", self.bottom_axis_depth)
            .result("counterexample_curve", self.counterexample_curve)
            .result("finite_u_nodes", &self.finite_u_nodes)
            .result("exterior_bottom", self.exterior_bottom)
            .result("bottom_flux", self.bottom_flux)
            .result("bottom_trace_residual", self.bottom_trace_residual)
            .result("axis_streamline", self.axis_streamline)
            .result("interior_endpoints", &self.interior_endpoints)
            .result("u_curves", &self.u_curves)
            .result("v_curves", &self.v_curves);
        r.check(
            "endpoints_on_boundary",
            self.interior_endpoints.is_empty(),
            format!("{} curve endpoints stop inside the window", self.interior_endpoints.len()),
        );
        match self.bottom {
            Some(_) => {
                let flux = self.bottom_flux.unwrap_or(f64::INFINITY);
                r.check("bottom_zero_flux", flux <= FLUX_TOLERANCE, format!("max |n·∇u|/|∇u| along B = {flux:.3e}"));
                let res = self.bottom_trace_residual.unwrap_or(f64::INFINITY);
                r.check("bottom_is_v_node", res <= TRACE_TOLERANCE, format!("max |v| on traced B = {res:.3e} · max|v|"));
                if let Some(a) = self.axis_streamline {
                    r.check("axis_is_streamline", a <= 1e-9, format!("max |v(0, y)| on the axis segment = {a:.3e}"));
                }
            }
            None => {
                r.check("bottom_found", false, "no v-node with both ends on the free surface");
            }
        }
        let counts = format!(
            "u: {} right-half / {} full-plane, v: {} / {}",
            self.u_nodes.right_half, self.u_nodes.full_plane, self.v_nodes.right_half, self.v_nodes.full_plane
        );
        match self.m {
            3 => {
                r.check(
                    "kuttler_counterexample",
                    self.kuttler_counterexample(),
                    match self.counterexample_curve {
                        Some(c) => format!("u-curve {c} has both ends on F inside W ({counts})"),
                        None => format!("no u-node with both ends on F inside W ({counts})"),
                    },
                );
            }
            5 => {
                r.check(
                    "node_counts",
                    self.v_nodes.full_plane == 2 && self.u_nodes.full_plane == 4,
                    format!("expected v: 2, u: 4 full-plane; {counts}"),
                );
                r.check(
                    "finite_u_nodes_inside_w",
                    self.finite_u_inside_exterior == Some(true),
                    format!("finite u-curves {:?} inside W of v-curve {:?}", self.finite_u_nodes, self.exterior_bottom),
                );
            }
            _ => {
                r.observe("node_counts", counts);
                r.observe("kuttler_counterexample", format!("found: {}", self.kuttler_counterexample()));
            }
        }
        if let Some(rc) = refinement {
            r.result("refinement", rc);
            r.check(
                "refinement_stable",
                rc.passed(),
                format!(
                    "counts match: {}, classes match: {}, max endpoint shift {:.3e} vs coarse step {:.3e}",
                    rc.counts_match, rc.classes_match, rc.max_endpoint_shift, rc.coarse_h
                ),
            );
        }
        r
    }
}

/// Comparison of a trace with its refinement at half the step.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RefinementCheck {
    pub coarse_h: f64,
    pub counts_match: bool,
    pub classes_match: bool,
    pub max_endpoint_shift: f64,
}

impl RefinementCheck {
    pub fn passed(&self) -> bool {
        self.counts_match && self.classes_match && self.max_endpoint_shift < self.coarse_h
    }
}

fn match_family(coarse: &[NodalCurve], fine: &[NodalCurve]) -> (bool, f64) {
    let mut classes_ok = true;
    let mut shift: f64 = 0.0;
    let mut taken = vec![false; fine.len()];
    for c in coarse {
        let best = fine
            .iter()
            .enumerate()
            .filter(|(k, f)| !taken[*k] && f.closed == c.closed)
            .map(|(k, f)| {
                let direct = dist(c.first(), f.first()).max(dist(c.last(), f.last()));
                let flipped = dist(c.first(), f.last()).max(dist(c.last(), f.first()));
                let d = if c.closed { c.distance_to(f.first()) } else { direct.min(flipped) };
                (k, d)
            })
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((k, d)) => {
                taken[k] = true;
                shift = shift.max(d);
                classes_ok &= c.endpoint_classes() == fine[k].endpoint_classes();
            }
            None => classes_ok = false,
        }
    }
    (classes_ok, shift)
}

/// Match curves of a coarse and a refined trace by endpoint proximity.
pub fn refinement_check(coarse: &CounterexampleReport, fine: &CounterexampleReport) -> RefinementCheck {
    let counts_match = coarse.u_curves.len() == fine.u_curves.len() && coarse.v_curves.len() == fine.v_curves.len();
    let (cu, su) = match_family(&coarse.u_curves, &fine.u_curves);
    let (cv, sv) = match_family(&coarse.v_curves, &fine.v_curves);
    RefinementCheck { coarse_h: coarse.h, counts_match, classes_match: cu && cv, max_endpoint_shift: su.max(sv) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_features() {
        let b = SloshingBoundary { window: TraceWindow::default() };
        assert_eq!(b.nearest([1.0, -0.01]).0, FreeSurface);
        assert_eq!(b.nearest([0.01, -1.0]).0, SymmetryAxis);
        assert_eq!(b.nearest([4.0 * PI - 0.01, -1.0]).0, OuterBoundary);
        assert_eq!(b.nearest([3.0, -2.0 * PI + 0.01]).0, OuterBoundary);
    }

    #[test]
    fn window_grid() {
        let (h, ny) = TraceWindow::default().grid(400).unwrap();
        assert!((h - PI / 100.0).abs() < 1e-15);
        assert_eq!(ny, 200);
        assert!(TraceWindow { x_max: -1.0, depth: 1.0 }.grid(100).is_err());
    }

    #[test]
    fn inventory_counts_mirror_images() {
        let mk = |start, end| NodalCurve { vertices: vec![[1.0, 0.0], [0.0, -1.0]], closed: false, start, end };
        let curves = vec![mk(Some(FreeSurface), Some(SymmetryAxis)), mk(Some(FreeSurface), Some(OuterBoundary))];
        assert_eq!(inventory(&curves), CurveInventory { right_half: 2, full_plane: 3 });
    }

    #[test]
    fn coarse_trace_lambda_three_halves() {
        let p = SloshingParams::new(3).unwrap();
        let r = trace_counterexample(p, TraceWindow::default(), 200).unwrap();
        assert!(r.kuttler_counterexample(), "{:?}", r.to_report(None).verdicts);
        assert!(r.interior_endpoints.is_empty());
    }
}
