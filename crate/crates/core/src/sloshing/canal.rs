use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::nodal::{EndpointClass, ScalarField2D, TaggedRect};

/// Separable sloshing mode of the rectangular canal
/// `(−a, a) × (−d, 0)`: `u = cos k(x + a) · cosh k(y + d)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CanalMode {
    pub halfwidth: f64,
    pub depth: f64,
    pub n: usize,
    pub wavenumber: f64,
    pub eigenvalue: f64,
    /// Abscissae of the vertical nodal lines.
    pub nodal_lines: Vec<f64>,
}

/// `n`-th non-constant mode: `k_n = nπ/(2a)`, `λ_n = k_n tanh(k_n d)`.
pub fn rectangular_canal_modes(halfwidth: f64, depth: f64, n: usize) -> Result<CanalMode> {
    if !(halfwidth > 0.0) || !(depth > 0.0) {
        return domain("canal half-width and depth must be positive");
    }
    if n < 1 {
        return domain("mode index must be at least 1");
    }
    let k = n as f64 * PI / (2.0 * halfwidth);
    let nodal_lines = (0..n).map(|j| -halfwidth + (2 * j + 1) as f64 * PI / (2.0 * k)).collect();
    Ok(CanalMode { halfwidth, depth, n, wavenumber: k, eigenvalue: k * (k * depth).tanh(), nodal_lines })
}

impl CanalMode {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let k = self.wavenumber;
        (k * (x + self.halfwidth)).cos() * (k * (y + self.depth)).cosh()
    }

    /// Cell-centred samples with `cells` cells across the width.
    pub fn field(&self, cells: usize) -> Result<ScalarField2D> {
        let h = 2.0 * self.halfwidth / cells as f64;
        // square cells; the top row sits half a cell below the surface
        let ny = ((self.depth / h).round() as usize).max(2);
        ScalarField2D::from_fn([-self.halfwidth + 0.5 * h, 0.5 * h - ny as f64 * h], h, cells, ny, |x, y| {
            self.eval(x, y)
        })
    }

    /// Canal walls: free surface on top, bottom below, side walls outer.
    pub fn boundary(&self) -> TaggedRect {
        TaggedRect {
            x: [-self.halfwidth, self.halfwidth],
            y: [-self.depth, 0.0],
            left: EndpointClass::OuterBoundary,
            right: EndpointClass::OuterBoundary,
            bottom: EndpointClass::Bottom,
            top: EndpointClass::FreeSurface,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nodal::{classify_endpoints, extract_zero_curves, nodal_domain_report};

    #[test]
    fn first_mode_single_central_line() {
        let m = rectangular_canal_modes(1.0, 0.7, 1).unwrap();
        assert_eq!(m.nodal_lines.len(), 1);
        assert!(m.nodal_lines[0].abs() < 1e-15);
        let f = m.field(101).unwrap();
        let curves = extract_zero_curves(&f);
        assert_eq!(curves.len(), 1);
        let c = classify_endpoints(&curves[0], &m.boundary(), f.h).unwrap();
        assert_eq!(c.endpoint_classes(), Some((EndpointClass::FreeSurface, EndpointClass::Bottom)));
        assert!(c.vertices.iter().all(|p| p[0].abs() < 1e-12));
    }

    #[test]
    fn second_mode_lines_at_quarter_width() {
        let m = rectangular_canal_modes(2.0, 1.0, 2).unwrap();
        assert!((m.nodal_lines[0] + 1.0).abs() < 1e-12 && (m.nodal_lines[1] - 1.0).abs() < 1e-12);
        // sign pattern of cos(k₂(x + a)) on a grid changes exactly at ±a/2
        let k = m.wavenumber;
        let xs: Vec<f64> = (0..4001).map(|i| -2.0 + 4.0 * i as f64 / 4000.0).collect();
        let flips: Vec<f64> =
            xs.windows(2).filter(|w| (k * (w[0] + 2.0)).cos() * (k * (w[1] + 2.0)).cos() < 0.0).map(|w| w[0]).collect();
        assert_eq!(flips.len(), 2);
        assert!((flips[0] + 1.0).abs() < 2e-3 && (flips[1] - 1.0).abs() < 2e-3);
        let f = m.field(120).unwrap();
        for c in extract_zero_curves(&f) {
            let c = classify_endpoints(&c, &m.boundary(), f.h).unwrap();
            assert_eq!(c.endpoint_classes(), Some((EndpointClass::FreeSurface, EndpointClass::Bottom)));
        }
    }

    #[test]
    fn eigenvalues_increase_and_satisfy_surface_condition() {
        let mut last = 0.0;
        for n in 1..=6 {
            let m = rectangular_canal_modes(1.5, 0.8, n).unwrap();
            assert!(m.eigenvalue > last);
            last = m.eigenvalue;
            let (x, e) = (0.3, 1e-5);
            let uy = (m.eval(x, e) - m.eval(x, -e)) / (2.0 * e);
            assert!((uy - m.eigenvalue * m.eval(x, 0.0)).abs() < 1e-6 * m.eigenvalue.max(1.0));
        }
    }

    #[test]
    fn kuttler_bound_for_first_six_modes() {
        for n in 1..=6 {
            let m = rectangular_canal_modes(1.0, 1.0, n).unwrap();
            let r = nodal_domain_report(&m.field(200).unwrap(), n, n + 1).unwrap();
            assert_eq!(r.components, n + 1);
            assert!(r.within_bound);
        }
    }

    #[test]
    fn rejects_bad_geometry() {
        assert!(rectangular_canal_modes(0.0, 1.0, 1).is_err());
        assert!(rectangular_canal_modes(1.0, -1.0, 1).is_err());
        assert!(rectangular_canal_modes(1.0, 1.0, 0).is_err());
    }
}
