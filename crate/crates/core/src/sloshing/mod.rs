//! Velocity potential `u` and stream function `v` of a two-dimensional
//! sloshing mode in the lower half-plane, their boundary identities, and the
//! tracing of their nodal curves.
//!
//! ```text
//! u(x, y) = ∫₀^∞ [cos k(x−π) + cos k(x+π)] / (k − λ) · e^{ky} dk
//! v(x, y) = ∫₀^∞ [sin k(x−π) + sin k(x+π)] / (λ − k) · e^{ky} dk
//! ```
//!
//! with `λ = m/2`, `m` odd, so both numerators vanish at `k = λ`.

mod canal;
mod trace;

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::quad::{integrate, uniform_breaks};

pub use canal::{rectangular_canal_modes, CanalMode};
pub use trace::{
    refinement_check, sample_fields, trace_counterexample, trace_sampled, CounterexampleReport, CurveInventory, RefinementCheck,
    SloshingBoundary, TraceWindow,
};

/// Spectral parameter `λ = m/2` with `m` odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SloshingParams {
    m: u32,
}

impl SloshingParams {
    pub fn new(m: u32) -> Result<Self> {
        if m.is_multiple_of(2) {
            return domain(format!("m = {m} must be a positive odd integer"));
        }
        Ok(SloshingParams { m })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn lambda(&self) -> f64 {
        self.m as f64 / 2.0
    }
}

fn require_below_surface(y: f64) -> Result<()> {
    if !(y < 0.0) {
        return domain(format!("y = {y} must be strictly negative"));
    }
    Ok(())
}

/// `∫₀^∞ e^{ikw} / (k − λ) dk` along a contour passing above the pole,
/// for `Im w > 0`. The path is rotated onto the ray of steepest descent
/// (kept at least 0.5 rad off the real axis); a ray below the real axis
/// picks up the residue at `k = λ`.
fn ray_term(w: Complex64, lambda: f64) -> Complex64 {
    let steepest = FRAC_PI_2 - w.arg();
    let theta = if steepest.abs() < 0.5 { 0.5 } else { steepest };
    let d = Complex64::from_polar(1.0, theta);
    // e^{i s d w} = e^{−α s} with Re α > 0
    let alpha = -Complex64::i() * d * w;
    let a = alpha.re;
    let omega = alpha.im / a;
    // scaled variable t = a s
    let f = |t: f64| Complex64::from_polar((-t).exp(), -omega * t) * d / (d * t - a * lambda);
    let pole = a * lambda;
    let mut breaks = vec![0.0];
    for b in [0.25 * pole, pole, 4.0 * pole, 2.0, 8.0, 20.0] {
        if b > *breaks.last().unwrap() && b < 40.0 {
            breaks.push(b);
        }
    }
    breaks.push(40.0);
    let mut value = integrate(f, &breaks, 1e-13, 1e-13, 400).value;
    if theta < 0.0 {
        value -= 2.0 * PI * Complex64::i() * (Complex64::i() * lambda * w).exp();
    }
    value
}

/// `u` and `v` at a point below the surface.
pub fn eval_uv(x: f64, y: f64, params: SloshingParams) -> Result<(f64, f64)> {
    require_below_surface(y)?;
    Ok(uv_unchecked(x, y, params.lambda()))
}

pub(crate) fn uv_unchecked(x: f64, y: f64, lambda: f64) -> (f64, f64) {
    // u − iv is analytic in ζ = x − iy
    let zeta = Complex64::new(x, -y);
    let g = ray_term(zeta - PI, lambda) + ray_term(zeta + PI, lambda);
    (g.re, -g.im)
}

/// `cos kπ / (k − λ)` without cancellation near `k = λ`.
fn cos_ratio(k: f64, lambda: f64) -> f64 {
    let z = 0.5 * PI * (k - lambda);
    let sinc = if z.abs() < 1e-8 { 1.0 - z * z / 6.0 } else { z.sin() / z };
    -PI * (0.5 * PI * (k + lambda)).sin() * sinc
}

fn real_axis_breaks(x: f64, y: f64, lambda: f64) -> Vec<f64> {
    let k_max = -40.0 / y;
    let width = (PI / (x.abs() + PI + 1.0)).min(k_max / 8.0);
    let split = (2.0 * lambda).min(k_max);
    let mut b = uniform_breaks(0.0, split, width);
    if split < k_max {
        b.extend(uniform_breaks(split, k_max, width).into_iter().skip(1));
    }
    b
}

/// `u` and `v` by adaptive quadrature along the real `k` axis, split at
/// `2λ` and truncated at `k = −40/y`. Slower than [`eval_uv`]; kept as an
/// independent reference.
pub fn eval_uv_real_axis(x: f64, y: f64, params: SloshingParams) -> Result<(f64, f64)> {
    require_below_surface(y)?;
    let lambda = params.lambda();
    let breaks = real_axis_breaks(x, y, lambda);
    let u = integrate(|k: f64| 2.0 * (k * x).cos() * cos_ratio(k, lambda) * (k * y).exp(), &breaks, 1e-12, 0.0, 100_000);
    let v = integrate(|k: f64| -2.0 * (k * x).sin() * cos_ratio(k, lambda) * (k * y).exp(), &breaks, 1e-12, 0.0, 100_000);
    Ok((u.value, v.value))
}

/// `(∂u/∂y − λu)(x, y)`. The factor `k − λ` cancels the denominator, leaving
/// `∫₀^∞ [cos k(x−π) + cos k(x+π)] e^{ky} dk`.
pub fn steklov_residual(x: f64, y: f64, params: SloshingParams) -> Result<f64> {
    require_below_surface(y)?;
    let breaks = real_axis_breaks(x, y, params.lambda());
    let q = integrate(
        |k: f64| (k * (x - PI)).cos() * (k * y).exp() + (k * (x + PI)).cos() * (k * y).exp(),
        &breaks,
        1e-12,
        0.0,
        breaks.len() * 8 + 1000,
    );
    Ok(q.value)
}

/// Closed form of [`steklov_residual`].
pub fn steklov_closed_form(x: f64, y: f64) -> f64 {
    -y / ((x - PI).powi(2) + y * y) - y / ((x + PI).powi(2) + y * y)
}

/// Sign pairing of the conjugacy system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// `u_x = v_y`, `u_y = −v_x`
    Standard,
    /// `u_x = −v_y`, `u_y = v_x`
    Reversed,
}

impl Orientation {
    fn sign(self) -> f64 {
        match self {
            Orientation::Standard => 1.0,
            Orientation::Reversed => -1.0,
        }
    }
}

struct Gradients {
    ux: f64,
    uy: f64,
    vx: f64,
    vy: f64,
}

fn central_gradients(x: f64, y: f64, lambda: f64, h: f64) -> Gradients {
    let (ue, ve) = uv_unchecked(x + h, y, lambda);
    let (uw, vw) = uv_unchecked(x - h, y, lambda);
    let (un, vn) = uv_unchecked(x, y + h, lambda);
    let (us, vs) = uv_unchecked(x, y - h, lambda);
    let s = 0.5 / h;
    Gradients { ux: (ue - uw) * s, uy: (un - us) * s, vx: (ve - vw) * s, vy: (vn - vs) * s }
}

/// Orientation of the conjugacy system, probed once at `(1, −1)` with
/// `λ = 3/2` and then fixed.
pub fn conjugacy_orientation() -> Orientation {
    static PROBE: OnceLock<Orientation> = OnceLock::new();
    *PROBE.get_or_init(|| {
        let g = central_gradients(1.0, -1.0, 1.5, 1e-3);
        let standard = (g.ux - g.vy).abs() + (g.uy + g.vx).abs();
        let reversed = (g.ux + g.vy).abs() + (g.uy - g.vx).abs();
        if standard <= reversed {
            Orientation::Standard
        } else {
            Orientation::Reversed
        }
    })
}

fn check_stencil(y: f64, h: f64) -> Result<()> {
    if !(h > 0.0) {
        return domain("step h must be positive");
    }
    if !(y + h < 0.0) {
        return domain(format!("stencil at y = {y} with h = {h} reaches the surface"));
    }
    Ok(())
}

/// Central-difference residuals `(u_x ∓ v_y, u_y ± v_x)` in the probed
/// orientation.
pub fn cauchy_riemann_residual(x: f64, y: f64, params: SloshingParams, h: f64) -> Result<(f64, f64)> {
    check_stencil(y, h)?;
    let s = conjugacy_orientation().sign();
    let g = central_gradients(x, y, params.lambda(), h);
    Ok((g.ux - s * g.vy, g.uy + s * g.vx))
}

/// Five-point Laplacian of `u`.
pub fn laplacian_residual(x: f64, y: f64, params: SloshingParams, h: f64) -> Result<f64> {
    check_stencil(y, h)?;
    let lambda = params.lambda();
    let u = |x, y| uv_unchecked(x, y, lambda).0;
    Ok((u(x + h, y) + u(x - h, y) + u(x, y + h) + u(x, y - h) - 4.0 * u(x, y)) / (h * h))
}

/// Gradient of `u` by central differences.
pub(crate) fn grad_u(x: f64, y: f64, lambda: f64, h: f64) -> [f64; 2] {
    let g = central_gradients(x, y, lambda, h);
    [g.ux, g.uy]
}

/// Gradient of `v` by central differences.
pub(crate) fn grad_v(x: f64, y: f64, lambda: f64, h: f64) -> [f64; 2] {
    let g = central_gradients(x, y, lambda, h);
    [g.vx, g.vy]
}

/// Observed convergence order from errors at successively halved steps.
pub fn observed_order(errors: &[f64]) -> f64 {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).fold(f64::INFINITY, f64::min)
}

/// Tolerance for the Steklov residual against its closed form.
pub const STEKLOV_TOLERANCE: f64 = 1e-6;
/// Minimum observed order of the finite-difference identity residuals.
pub const MIN_ORDER: f64 = 1.8;

/// Steklov, Cauchy–Riemann and harmonicity checks for one `λ`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub grid: usize,
    /// Largest `|residual − closed form|` over the sample grid.
    pub steklov_max_error: f64,
    pub steps: Vec<f64>,
    /// Minimum observed order over the probe points.
    pub cauchy_riemann_order: f64,
    pub laplacian_order: f64,
}

const PROBES: [(f64, f64); 3] = [(1.0, -1.0), (2.5, -0.7), (0.5, -2.0)];

/// Steklov residual on a `grid × grid` sample of `[0.25, 5] × [−2, −0.1]`
/// and identity residual orders under `h ∈ {0.2, 0.1, 0.05}`.
pub fn identity_check(params: SloshingParams, grid: usize) -> Result<IdentityCheck> {
    if grid < 2 {
        return domain("sample grid needs at least 2 points per side");
    }
    let at = |a: f64, b: f64, i: usize| a + (b - a) * i as f64 / (grid - 1) as f64;
    let mut steklov_max_error = 0.0f64;
    for i in 0..grid {
        for j in 0..grid {
            let (x, y) = (at(0.25, 5.0, i), at(-2.0, -0.1, j));
            steklov_max_error = steklov_max_error.max((steklov_residual(x, y, params)? - steklov_closed_form(x, y)).abs());
        }
    }
    let steps = vec![0.2, 0.1, 0.05];
    let (mut cr, mut lap) = (f64::INFINITY, f64::INFINITY);
    for (x, y) in PROBES {
        let c = steps
            .iter()
            .map(|&h| cauchy_riemann_residual(x, y, params, h).map(|(a, b)| a.hypot(b)))
            .collect::<Result<Vec<_>>>()?;
        let l = steps.iter().map(|&h| laplacian_residual(x, y, params, h).map(f64::abs)).collect::<Result<Vec<_>>>()?;
        cr = cr.min(observed_order(&c));
        lap = lap.min(observed_order(&l));
    }
    Ok(IdentityCheck { grid, steklov_max_error, steps, cauchy_riemann_order: cr, laplacian_order: lap })
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.steklov_max_error <= STEKLOV_TOLERANCE && self.cauchy_riemann_order >= MIN_ORDER && self.laplacian_order >= MIN_ORDER
    }

    pub fn append_to(&self, r: &mut crate::report::ExperimentReport) {
        r.result("identities", self);
        r.check(
            "steklov_identity",
            self.steklov_max_error <= STEKLOV_TOLERANCE,
            format!("max |residual − closed form| = {:.3e} on a {}×{} grid", self.steklov_max_error, self.grid, self.grid),
        );
        r.check(
            "cauchy_riemann_order",
            self.cauchy_riemann_order >= MIN_ORDER,
            format!("observed order {:.3}", self.cauchy_riemann_order),
        );
        r.check("harmonic_order", self.laplacian_order >= MIN_ORDER, format!("observed order {:.3}", self.laplacian_order));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::gk21;

    fn p(m: u32) -> SloshingParams {
        SloshingParams::new(m).unwrap()
    }

    #[test]
    fn params_require_odd_m() {
        assert!(SloshingParams::new(4).is_err());
        assert!(SloshingParams::new(0).is_err());
        assert_eq!(p(5).lambda(), 2.5);
    }

    #[test]
    fn surface_is_rejected() {
        assert!(eval_uv(1.0, 0.0, p(3)).is_err());
        assert!(eval_uv(1.0, 0.1, p(3)).is_err());
        assert!(steklov_residual(1.0, 0.0, p(3)).is_err());
        assert!(cauchy_riemann_residual(1.0, -0.01, p(3), 0.02).is_err());
        assert!(cauchy_riemann_residual(1.0, -1.0, p(3), 0.0).is_err());
    }

    #[test]
    fn contour_matches_real_axis() {
        for m in [1, 3, 5, 7] {
            for &(x, y) in &[(1.0, -0.5), (3.0, -1.0), (0.2, -2.0), (5.0, -0.3), (PI, -0.2), (-2.0, -0.7), (9.0, -4.0)] {
                let (u, v) = eval_uv(x, y, p(m)).unwrap();
                let (ur, vr) = eval_uv_real_axis(x, y, p(m)).unwrap();
                assert!((u - ur).abs() < 1e-8, "m={m} ({x},{y}) u {u} vs {ur}");
                assert!((v - vr).abs() < 1e-8, "m={m} ({x},{y}) v {v} vs {vr}");
            }
        }
    }

    #[test]
    fn fixed_overkill_quadrature_reference() {
        // composite 21-point rule on 0.005-wide panels up to k = 80
        let (x, y, lambda) = (1.0, -0.5, 1.5);
        let f = |k: f64| 2.0 * (k * x).cos() * cos_ratio(k, lambda) * (k * y).exp();
        let n = 16_000;
        let reference: f64 = (0..n).map(|i| gk21(&f, i as f64 * 0.005, (i + 1) as f64 * 0.005).0).sum();
        let (u, _) = eval_uv(x, y, p(3)).unwrap();
        assert!((u - reference).abs() < 1e-7, "{u} vs {reference}");
    }

    #[test]
    fn symmetry_about_axis() {
        for m in [3, 5] {
            for &(x, y) in &[(0.7, -0.3), (2.0, -1.5), (4.5, -0.1), (1.3, -3.0)] {
                let (u1, v1) = eval_uv(x, y, p(m)).unwrap();
                let (u2, v2) = eval_uv(-x, y, p(m)).unwrap();
                assert!((u1 - u2).abs() < 1e-9 && (v1 + v2).abs() < 1e-9);
            }
            for y in [-0.05, -0.5, -2.0, -6.0] {
                assert!(eval_uv(0.0, y, p(m)).unwrap().1.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn steklov_examples() {
        let r = steklov_residual(0.0, -1.0, p(3)).unwrap();
        assert!((r - 2.0 / (PI * PI + 1.0)).abs() < 1e-9);
        assert!((r - 0.1840).abs() < 1e-4);
        assert!(steklov_residual(5.0, -0.001, p(3)).unwrap().abs() < 1e-2);
        let a = steklov_residual(1.7, -0.4, p(5)).unwrap();
        let b = steklov_residual(-1.7, -0.4, p(5)).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn steklov_residual_matches_derivative_form() {
        // u_y − λu from the evaluator itself
        let (x, y, h) = (1.2, -0.6, 1e-4);
        let lambda = 1.5;
        let uy = (uv_unchecked(x, y + h, lambda).0 - uv_unchecked(x, y - h, lambda).0) / (2.0 * h);
        let u = uv_unchecked(x, y, lambda).0;
        assert!((uy - lambda * u - steklov_closed_form(x, y)).abs() < 1e-6);
    }

    #[test]
    fn identity_battery() {
        for m in [3, 5] {
            let c = identity_check(p(m), 20).unwrap();
            assert!(c.passed(), "{c:?}");
        }
    }

    #[test]
    fn orientation_is_standard() {
        assert_eq!(conjugacy_orientation(), Orientation::Standard);
    }

    #[test]
    fn cauchy_riemann_small_and_second_order() {
        let (r1, r2) = cauchy_riemann_residual(1.0, -1.0, p(3), 1e-3).unwrap();
        assert!(r1.abs() < 1e-5 && r2.abs() < 1e-5);
        let errs: Vec<f64> = [0.2, 0.1, 0.05]
            .iter()
            .map(|&h| {
                let (a, b) = cauchy_riemann_residual(1.0, -1.0, p(3), h).unwrap();
                a.hypot(b)
            })
            .collect();
        assert!(observed_order(&errs) > 1.8, "{errs:?}");
    }

    #[test]
    fn residual_parity_on_axis() {
        // u even, v odd: u_x = v_y = 0 on the axis, so r1 vanishes there
        let (r1, _) = cauchy_riemann_residual(0.0, -0.5, p(3), 0.05).unwrap();
        assert!(r1.abs() < 1e-10);
    }

    #[test]
    fn harmonic_to_second_order() {
        let errs: Vec<f64> =
            [0.2, 0.1, 0.05].iter().map(|&h| laplacian_residual(1.0, -1.0, p(3), h).unwrap().abs()).collect();
        assert!(errs[2] < 1e-3);
        assert!(observed_order(&errs) > 1.8, "{errs:?}");
    }
}
