use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::nodal::{
    count_sign_components, BoundaryModel, Connectivity, EndpointClass, Point, ScalarField2D, TaggedRect,
};

/// Cells a hole must span on the unit circle.
pub const MIN_HOLE_CELLS: f64 = 3.0;

/// Planar domain for the Dirichlet problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DomainSpec {
    Disc { radius: f64 },
    /// `1 < ρ < outer`.
    Annulus { outer: f64 },
    /// `(0, a) × (0, b)`.
    Rect { a: f64, b: f64 },
    /// Unit disc plus the annulus `1 < ρ < outer`, separated by the unit
    /// circle except for `n` holes of angular half-width `eps` centred at
    /// `2πk/n`.
    PuncturedAnnulus { n: usize, eps: f64, outer: f64 },
    /// Explicit grid mask; its spacing must match the requested `h`.
    Mask { field: ScalarField2D },
}

impl DomainSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, what: &str| if v > 0.0 && v.is_finite() { Ok(()) } else { domain(format!("{what} must be positive")) };
        match *self {
            DomainSpec::Disc { radius } => positive(radius, "radius"),
            DomainSpec::Annulus { outer } => {
                if outer > 1.0 && outer.is_finite() {
                    Ok(())
                } else {
                    domain("annulus needs r > 1")
                }
            }
            DomainSpec::Rect { a, b } => positive(a, "side a").and(positive(b, "side b")),
            DomainSpec::PuncturedAnnulus { n, eps, outer } => {
                if !(outer > 1.0 && outer.is_finite()) {
                    domain("punctured annulus needs r > 1")
                } else if n < 2 {
                    domain("punctured annulus needs N ≥ 2")
                } else if !(eps > 0.0 && eps < PI / n as f64) {
                    domain(format!("punctured annulus needs ε in (0, π/N) = (0, {:.6})", PI / n as f64))
                } else {
                    Ok(())
                }
            }
            DomainSpec::Mask { ref field } => {
                if field.active_count() == 0 {
                    domain("mask has no active samples")
                } else {
                    Ok(())
                }
            }
        }
    }

    /// True when the grid can place every boundary exactly on grid lines.
    pub fn boundary_aligned(&self, h: f64) -> bool {
        let whole = |v: f64| ((v / h) - (v / h).round()).abs() < 1e-9;
        matches!(*self, DomainSpec::Rect { a, b } if whole(a) && whole(b))
    }

    pub fn is_convex(&self) -> bool {
        matches!(self, DomainSpec::Disc { .. } | DomainSpec::Rect { .. })
    }

    pub fn area(&self) -> Option<f64> {
        match *self {
            DomainSpec::Disc { radius } => Some(PI * radius * radius),
            DomainSpec::Annulus { outer } => Some(PI * (outer * outer - 1.0)),
            DomainSpec::Rect { a, b } => Some(a * b),
            DomainSpec::PuncturedAnnulus { outer, .. } => Some(PI * outer * outer),
            DomainSpec::Mask { .. } => None,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            DomainSpec::Disc { radius } => format!("disc({radius})"),
            DomainSpec::Annulus { outer } => format!("annulus(1, {outer})"),
            DomainSpec::Rect { a, b } => format!("rect({a}, {b})"),
            DomainSpec::PuncturedAnnulus { n, eps, outer } => format!("punctured-annulus({n}, {eps}, {outer})"),
            DomainSpec::Mask { ref field } => format!("mask({}×{})", field.nx, field.ny),
        }
    }

    /// Boundary features used to tag nodal-curve endpoints.
    pub fn boundary(&self) -> DomainBoundary {
        DomainBoundary { spec: self.clone() }
    }
}

fn in_hole(x: f64, y: f64, n: usize, eps: f64) -> bool {
    let step = TAU / n as f64;
    let phi = y.atan2(x).rem_euclid(TAU);
    let k = (phi / step).round();
    (phi - k * step).abs() < eps
}

/// Active grid points of `spec` at spacing `h`; the mask field carries
/// value 1 on active points.
///
/// Points are node-centred and strictly interior; the outermost ring of the
/// grid is always inactive so every active point has four neighbours.
pub fn build_mask(spec: &DomainSpec, h: f64) -> Result<ScalarField2D> {
    spec.validate()?;
    if !(h > 0.0 && h.is_finite()) {
        return domain("grid spacing must be positive");
    }
    let one = |_: f64, _: f64| 1.0;
    let tiny = 1e-9 * h;
    let mask = match *spec {
        DomainSpec::Disc { radius } => {
            let n = (radius / h - 1e-9).ceil() as usize + 1;
            let o = -(n as f64) * h;
            ScalarField2D::from_fn_masked([o, o], h, 2 * n + 1, 2 * n + 1, one, |x, y| x.hypot(y) < radius - tiny)?
        }
        DomainSpec::Annulus { outer } => {
            let n = (outer / h - 1e-9).ceil() as usize + 1;
            let o = -(n as f64) * h;
            ScalarField2D::from_fn_masked([o, o], h, 2 * n + 1, 2 * n + 1, one, |x, y| {
                let rho = x.hypot(y);
                rho > 1.0 + tiny && rho < outer - tiny
            })?
        }
        DomainSpec::Rect { a, b } => {
            let nx = (a / h - 1e-9).ceil() as usize + 1;
            let ny = (b / h - 1e-9).ceil() as usize + 1;
            ScalarField2D::from_fn_masked([0.0, 0.0], h, nx, ny, one, |x, y| {
                x > tiny && x < a - tiny && y > tiny && y < b - tiny
            })?
        }
        DomainSpec::PuncturedAnnulus { n, eps, outer } => {
            let cells = 2.0 * eps / h;
            if cells < MIN_HOLE_CELLS {
                return Err(Error::Resolution(format!(
                    "holes span {cells:.2} cells on the unit circle; need at least {MIN_HOLE_CELLS} (h ≤ {:.6})",
                    2.0 * eps / MIN_HOLE_CELLS
                )));
            }
            let m = (outer / h - 1e-9).ceil() as usize + 1;
            let o = -(m as f64) * h;
            let inside_unit = |x: f64, y: f64| x.hypot(y) < 1.0;
            // wall: points on or outside ρ = 1 with a 4-neighbour inside it
            let wall = |x: f64, y: f64| {
                !inside_unit(x, y)
                    && [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)].iter().any(|&(dx, dy)| inside_unit(x + dx, y + dy))
                    && !in_hole(x, y, n, eps)
            };
            ScalarField2D::from_fn_masked([o, o], h, 2 * m + 1, 2 * m + 1, one, |x, y| {
                x.hypot(y) < outer - tiny && !wall(x, y)
            })?
        }
        DomainSpec::Mask { ref field } => {
            if (field.h - h).abs() > 1e-12 * h {
                return domain(format!("explicit mask has spacing {}, requested {h}", field.h));
            }
            let values = field.mask().iter().map(|&a| if a { 1.0 } else { 0.0 }).collect();
            let mut mask = field.mask().to_vec();
            // keep the outer ring inactive
            for j in 0..field.ny {
                for i in 0..field.nx {
                    if i == 0 || j == 0 || i + 1 == field.nx || j + 1 == field.ny {
                        mask[j * field.nx + i] = false;
                    }
                }
            }
            ScalarField2D::new(field.origin, h, field.nx, field.ny, values, mask)?
        }
    };
    if mask.active_count() == 0 {
        return Err(Error::Resolution(format!("no interior grid points at h = {h}")));
    }
    Ok(mask)
}

/// Number of 4-connected components of the active set.
pub fn mask_components(mask: &ScalarField2D) -> usize {
    count_sign_components(mask, Connectivity::Four).map(|c| c.components).unwrap_or(0)
}

/// Nearest boundary feature of a [`DomainSpec`].
#[derive(Debug, Clone)]
pub struct DomainBoundary {
    spec: DomainSpec,
}

fn circle(p: Point, r: f64) -> f64 {
    (p[0].hypot(p[1]) - r).abs()
}

/// Distance from `p` to the part of the unit circle outside the holes.
fn wall_distance(p: Point, n: usize, eps: f64) -> f64 {
    if !in_hole(p[0], p[1], n, eps) {
        return circle(p, 1.0);
    }
    // nearest hole rim
    let step = TAU / n as f64;
    let phi = p[1].atan2(p[0]).rem_euclid(TAU);
    let k = (phi / step).round();
    [k * step - eps, k * step + eps]
        .iter()
        .map(|&t| (p[0] - t.cos()).hypot(p[1] - t.sin()))
        .fold(f64::INFINITY, f64::min)
}

impl BoundaryModel for DomainBoundary {
    fn nearest(&self, p: Point) -> (EndpointClass, f64) {
        match self.spec {
            DomainSpec::Disc { radius } => (EndpointClass::OuterBoundary, circle(p, radius)),
            DomainSpec::Annulus { outer } => {
                let (di, dout) = (circle(p, 1.0), circle(p, outer));
                if di < dout {
                    (EndpointClass::InnerBoundary, di)
                } else {
                    (EndpointClass::OuterBoundary, dout)
                }
            }
            DomainSpec::Rect { a, b } => TaggedRect::uniform([0.0, a], [0.0, b], EndpointClass::OuterBoundary).nearest(p),
            DomainSpec::PuncturedAnnulus { n, eps, outer } => {
                let (di, dout) = (wall_distance(p, n, eps), circle(p, outer));
                if di < dout {
                    (EndpointClass::InnerBoundary, di)
                } else {
                    (EndpointClass::OuterBoundary, dout)
                }
            }
            DomainSpec::Mask { ref field } => {
                // nearest inactive sample
                let mut best = f64::INFINITY;
                for j in 0..field.ny {
                    for i in 0..field.nx {
                        if !field.active(i, j) {
                            let q = field.point(i, j);
                            best = best.min((p[0] - q[0]).hypot(p[1] - q[1]));
                        }
                    }
                }
                (EndpointClass::OuterBoundary, best)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_cell_count_matches_area() {
        let h = 1.0 / 64.0;
        let m = build_mask(&DomainSpec::Disc { radius: 1.0 }, h).unwrap();
        let expected = PI / (h * h);
        assert!((m.active_count() as f64 - expected).abs() < 0.02 * expected);
    }

    #[test]
    fn punctured_annulus_is_connected_through_holes() {
        let spec = DomainSpec::PuncturedAnnulus { n: 4, eps: 0.1, outer: 2.0 };
        let m = build_mask(&spec, 1.0 / 64.0).unwrap();
        assert_eq!(mask_components(&m), 1);
        // with every hole walled off the two pieces separate
        let closed = ScalarField2D::new(
            m.origin,
            m.h,
            m.nx,
            m.ny,
            m.values().to_vec(),
            (0..m.ny)
                .flat_map(|j| (0..m.nx).map(move |i| (i, j)))
                .map(|(i, j)| {
                    let [x, y] = m.point(i, j);
                    let rho = x.hypot(y);
                    m.active(i, j) && !(rho >= 1.0 && rho < 1.0 + 1.5 * m.h)
                })
                .collect(),
        )
        .unwrap();
        assert_eq!(mask_components(&closed), 2);
    }

    #[test]
    fn invariants_rejected() {
        let h = 1.0 / 64.0;
        assert!(build_mask(&DomainSpec::PuncturedAnnulus { n: 4, eps: PI / 4.0, outer: 2.0 }, h).is_err());
        assert!(build_mask(&DomainSpec::PuncturedAnnulus { n: 1, eps: 0.1, outer: 2.0 }, h).is_err());
        assert!(build_mask(&DomainSpec::Annulus { outer: 1.0 }, h).is_err());
        assert!(build_mask(&DomainSpec::Disc { radius: -1.0 }, h).is_err());
        let r = build_mask(&DomainSpec::PuncturedAnnulus { n: 3, eps: 0.02, outer: 2.0 }, 1.0 / 32.0);
        assert!(matches!(r, Err(Error::Resolution(_))));
    }

    #[test]
    fn rect_alignment() {
        assert!(DomainSpec::Rect { a: PI, b: PI }.boundary_aligned(PI / 32.0));
        assert!(!DomainSpec::Rect { a: PI, b: 2.0 }.boundary_aligned(PI / 32.0));
        let m = build_mask(&DomainSpec::Rect { a: PI, b: PI }, PI / 32.0).unwrap();
        assert_eq!(m.active_count(), 31 * 31);
    }

    #[test]
    fn boundary_tags() {
        let b = DomainSpec::Annulus { outer: 2.0 }.boundary();
        assert_eq!(b.nearest([1.1, 0.0]).0, EndpointClass::InnerBoundary);
        assert_eq!(b.nearest([0.0, -1.9]).0, EndpointClass::OuterBoundary);
        let p = DomainSpec::PuncturedAnnulus { n: 3, eps: 0.2, outer: 2.0 }.boundary();
        // centre of a hole is far from the wall
        assert!(p.nearest([1.0, 0.0]).1 > 0.19);
        assert!(p.nearest([0.0, 1.0]).1 < 1e-12);
    }
}
