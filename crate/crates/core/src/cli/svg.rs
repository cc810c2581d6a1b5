//! Deterministic SVG contour plots.

use std::fmt::Write;

use crate::nodal::NodalCurve;

/// Plot window in data coordinates: `x ∈ [x_min, x_max]`, `y ∈ [y_min, y_max]`.
#[derive(Debug, Clone, Copy)]
pub struct PlotWindow {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineStyle {
    Solid,
    Dashed,
}

/// One family of curves drawn in a common style.
#[derive(Debug, Clone, Copy)]
pub struct CurveSet<'a> {
    pub label: &'a str,
    pub curves: &'a [NodalCurve],
    pub style: LineStyle,
}

const WIDTH: f64 = 800.0;
const MARGIN: f64 = 50.0;

/// Render curve families on labelled axes. Output depends only on the
/// inputs (fixed number formatting, no timestamps); with no curves the axes
/// are drawn with a warning note.
pub fn render_contours(window: PlotWindow, sets: &[CurveSet<'_>]) -> String {
    let (dx, dy) = (window.x_max - window.x_min, window.y_max - window.y_min);
    let scale = (WIDTH - 2.0 * MARGIN) / dx;
    let height = (dy * scale + 2.0 * MARGIN).round();
    let px = |x: f64| MARGIN + (x - window.x_min) * scale;
    let py = |y: f64| MARGIN + (window.y_max - y) * scale;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{height}" fill="white"/>"#);
    // axes through the origin when it is in view, else along the frame
    let ax = py(0.0_f64.clamp(window.y_min, window.y_max));
    let ay = px(0.0_f64.clamp(window.x_min, window.x_max));
    let _ = writeln!(
        s,
        r#"<line x1="{:.3}" y1="{ax:.3}" x2="{:.3}" y2="{ax:.3}" stroke="black" stroke-width="1"/>"#,
        px(window.x_min),
        px(window.x_max)
    );
    let _ = writeln!(
        s,
        r#"<line x1="{ay:.3}" y1="{:.3}" x2="{ay:.3}" y2="{:.3}" stroke="black" stroke-width="1"/>"#,
        py(window.y_min),
        py(window.y_max)
    );
    let _ = writeln!(s, r#"<text x="{:.3}" y="{:.3}" font-size="14">x</text>"#, px(window.x_max) + 8.0, ax + 4.0);
    let _ = writeln!(s, r#"<text x="{:.3}" y="{:.3}" font-size="14">y</text>"#, ay - 4.0, py(window.y_max) - 10.0);
    let mut drawn = 0;
    for set in sets {
        let dash = match set.style {
            LineStyle::Solid => "",
            LineStyle::Dashed => r#" stroke-dasharray="6 4""#,
        };
        let _ = writeln!(s, r#"<g id="{}" fill="none" stroke="black" stroke-width="1.5"{dash}>"#, set.label);
        for c in set.curves {
            let mut points = String::new();
            for p in &c.vertices {
                let _ = write!(points, "{:.3},{:.3} ", px(p[0]), py(p[1]));
            }
            let tag = if c.closed { "polygon" } else { "polyline" };
            let _ = writeln!(s, r#"<{tag} points="{}"/>"#, points.trim_end());
            drawn += 1;
        }
        let _ = writeln!(s, "</g>");
    }
    if drawn == 0 {
        let _ = writeln!(s, r#"<text x="{MARGIN}" y="{:.3}" font-size="14" fill="red">warning: no curves to draw</text>"#, MARGIN - 20.0);
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn window() -> PlotWindow {
        PlotWindow { x_min: 0.0, x_max: 4.0, y_min: -2.0, y_max: 0.0 }
    }

    #[test]
    fn empty_input_draws_axes_with_warning() {
        let svg = render_contours(window(), &[]);
        assert!(svg.contains("<line") && svg.contains(">x</text>") && svg.contains(">y</text>"));
        assert!(svg.contains("warning"));
    }

    #[test]
    fn styles_and_determinism() {
        let c = vec![NodalCurve { vertices: vec![[1.0, 0.0], [2.0, -1.0], [3.0, 0.0]], closed: false, start: None, end: None }];
        let sets = [
            CurveSet { label: "u", curves: &c, style: LineStyle::Solid },
            CurveSet { label: "v", curves: &c, style: LineStyle::Dashed },
        ];
        let a = render_contours(window(), &sets);
        assert_eq!(a, render_contours(window(), &sets));
        assert_eq!(a.matches("stroke-dasharray").count(), 1);
        assert_eq!(a.matches("<polyline").count(), 2);
        assert!(!a.contains("warning"));
    }
}
