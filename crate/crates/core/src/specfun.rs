//! Bessel functions J₀, J₁, Y₀, Y₁ of real argument, their first zeros, and
//! the least root μ(r) of the annulus cross-product
//! `J₀(μ)Y₀(μr) − J₀(μr)Y₀(μ)`.
//!
//! Evaluation uses the ascending power series up to [`SERIES_LIMIT`] and the
//! Hankel asymptotic expansion beyond it.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Branch switch point between the power series and the asymptotic expansion.
pub const SERIES_LIMIT: f64 = 12.0;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Scan step used to locate the first sign change of the cross-product.
pub const CROSS_SCAN_STEP: f64 = 0.05;

/// Bracket width at which bisection stops.
pub const BISECTION_WIDTH: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BesselKind {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BesselOrder {
    Zero,
    One,
}

impl BesselOrder {
    pub fn from_int(order: u32) -> Result<Self> {
        match order {
            0 => Ok(BesselOrder::Zero),
            1 => Ok(BesselOrder::One),
            _ => domain(format!("Bessel order {order} not supported (only 0 and 1)")),
        }
    }

    fn nu(self) -> f64 {
        match self {
            BesselOrder::Zero => 0.0,
            BesselOrder::One => 1.0,
        }
    }
}

/// A single evaluated Bessel value.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BesselValue {
    pub order: u32,
    pub kind: BesselKind,
    pub argument: f64,
    pub value: f64,
}

/// Least positive root of the annulus cross-product for radius ratio `r`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CrossProductRoot {
    pub radius_ratio: f64,
    pub mu: f64,
    pub residual: f64,
}

/// Evaluate `J_order(x)` or `Y_order(x)`.
pub fn bessel(order: BesselOrder, kind: BesselKind, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return domain(format!("Bessel argument must be finite, got {x}"));
    }
    match kind {
        BesselKind::First => {
            // J₀ is even and J₁ is odd.
            let ax = x.abs();
            let v = if ax <= SERIES_LIMIT { j_series(order, ax) } else { hankel(order, ax).0 };
            Ok(match order {
                BesselOrder::One if x < 0.0 => -v,
                _ => v,
            })
        }
        BesselKind::Second => {
            if x <= 0.0 {
                return domain(format!("Y_{} requires a positive argument, got {x}", order.nu()));
            }
            Ok(if x <= SERIES_LIMIT { y_series(order, x) } else { hankel(order, x).1 })
        }
    }
}

/// Evaluate with a [`BesselValue`] record.
pub fn bessel_value(order: u32, kind: BesselKind, x: f64) -> Result<BesselValue> {
    let value = bessel(BesselOrder::from_int(order)?, kind, x)?;
    Ok(BesselValue { order, kind, argument: x, value })
}

pub fn j0(x: f64) -> f64 {
    bessel(BesselOrder::Zero, BesselKind::First, x).expect("finite argument")
}

pub fn j1(x: f64) -> f64 {
    bessel(BesselOrder::One, BesselKind::First, x).expect("finite argument")
}

/// `Y₀(x)`; callers guarantee `x > 0`.
pub fn y0(x: f64) -> f64 {
    bessel(BesselOrder::Zero, BesselKind::Second, x).expect("positive argument")
}

/// `Y₁(x)`; callers guarantee `x > 0`.
pub fn y1(x: f64) -> f64 {
    bessel(BesselOrder::One, BesselKind::Second, x).expect("positive argument")
}

/// Ascending series for J₀ / J₁ at `x ≥ 0`.
pub(crate) fn j_series(order: BesselOrder, x: f64) -> f64 {
    let q = 0.25 * x * x;
    match order {
        BesselOrder::Zero => {
            let mut term = 1.0;
            let mut sum = 1.0;
            for k in 1..200 {
                let kf = k as f64;
                term *= -q / (kf * kf);
                sum += term;
                if term.abs() < 1e-17 * sum.abs().max(1e-300) {
                    break;
                }
            }
            sum
        }
        BesselOrder::One => {
            let mut term = 0.5 * x;
            let mut sum = term;
            for k in 1..200 {
                let kf = k as f64;
                term *= -q / (kf * (kf + 1.0));
                sum += term;
                if term.abs() < 1e-17 * sum.abs().max(1e-300) {
                    break;
                }
            }
            sum
        }
    }
}

/// Ascending series for Y₀ / Y₁ at `x > 0` (Neumann's expansion).
pub(crate) fn y_series(order: BesselOrder, x: f64) -> f64 {
    let q = 0.25 * x * x;
    let log_half = (0.5 * x).ln();
    match order {
        BesselOrder::Zero => {
            // Y₀ = (2/π)[(ln(x/2) + γ) J₀ + Σ_{k≥1} (−1)^{k+1} H_k q^k / (k!)²]
            let mut term = 1.0;
            let mut harmonic = 0.0;
            let mut sum = 0.0;
            for k in 1..200 {
                let kf = k as f64;
                term *= -q / (kf * kf);
                harmonic += 1.0 / kf;
                let add = -term * harmonic;
                sum += add;
                if add.abs() < 1e-17 * sum.abs().max(1e-300) && k > 2 {
                    break;
                }
            }
            2.0 / PI * ((log_half + EULER_GAMMA) * j_series(BesselOrder::Zero, x) + sum)
        }
        BesselOrder::One => {
            // Y₁ = (2/π) J₁ ln(x/2) − 2/(πx)
            //      − (1/π) Σ_{k≥0} (−1)^k [ψ(k+1) + ψ(k+2)] (x/2)^{2k+1} / (k!(k+1)!)
            let mut term = 0.5 * x;
            // ψ(k+1) = −γ + H_k
            let mut h_k = 0.0;
            let mut sum = term * (2.0 * -EULER_GAMMA + 1.0);
            for k in 1..200 {
                let kf = k as f64;
                term *= -q / (kf * (kf + 1.0));
                h_k += 1.0 / kf;
                let psi_sum = -2.0 * EULER_GAMMA + 2.0 * h_k + 1.0 / (kf + 1.0);
                let add = term * psi_sum;
                sum += add;
                if add.abs() < 1e-17 * sum.abs().max(1e-300) && k > 2 {
                    break;
                }
            }
            2.0 / PI * j_series(BesselOrder::One, x) * log_half - 2.0 / (PI * x) - sum / PI
        }
    }
}

/// Hankel asymptotic expansion; returns `(J_ν(x), Y_ν(x))`.
pub(crate) fn hankel(order: BesselOrder, x: f64) -> (f64, f64) {
    let nu = order.nu();
    let mu4 = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0; // a_k(ν) / x^k
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        a *= (mu4 - odd * odd) / (kf * 8.0 * x);
        if a.abs() >= last || a.abs() < 1e-18 {
            break;
        }
        last = a.abs();
        // P collects even k with sign (−1)^{k/2}; Q odd k with sign (−1)^{(k−1)/2}.
        match k % 4 {
            0 => p += a,
            1 => q += a,
            2 => p -= a,
            _ => q -= a,
        }
    }
    let chi = x - (0.5 * nu + 0.25) * PI;
    let scale = (2.0 / (PI * x)).sqrt();
    let (s, c) = chi.sin_cos();
    (scale * (p * c - q * s), scale * (p * s + q * c))
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, width: f64) -> f64 {
    let mut flo = f(lo);
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Least positive zero of `J_order`, located by a sign-change scan from 0⁺
/// and polished by bisection.
pub fn bessel_first_zero(order: BesselOrder) -> f64 {
    let f = |x: f64| bessel(order, BesselKind::First, x).expect("finite argument");
    let step = 0.1;
    let mut lo = step;
    let mut flo = f(lo);
    loop {
        let hi = lo + step;
        let fhi = f(hi);
        if (flo < 0.0) != (fhi < 0.0) {
            return bisect(f, lo, hi, 1e-13);
        }
        lo = hi;
        flo = fhi;
    }
}

/// The annulus cross-product `J₀(λ)Y₀(λr) − J₀(λr)Y₀(λ)`.
pub fn cross_product(lambda: f64, r: f64) -> f64 {
    j0(lambda) * y0(lambda * r) - j0(lambda * r) * y0(lambda)
}

/// Least positive root μ(r) of the cross-product, for `r > 1`.
///
/// The scan starts at one step above zero; as λ → 0⁺ the cross-product tends
/// to (2/π) ln r > 0, so no root is skipped below the first sample.
pub fn cross_product_mu(r: f64) -> Result<CrossProductRoot> {
    if !(r > 1.0) || !r.is_finite() {
        return domain(format!("radius ratio must exceed 1, got {r}"));
    }
    let f = |l: f64| cross_product(l, r);
    let mut lo = CROSS_SCAN_STEP;
    let mut flo = f(lo);
    // μ(r) ≤ π/(r−1) + j₀,₁ is a generous ceiling for the scan.
    let ceiling = PI / (r - 1.0) + 10.0;
    while lo < ceiling {
        let hi = lo + CROSS_SCAN_STEP;
        let fhi = f(hi);
        if (flo < 0.0) != (fhi < 0.0) {
            let mu = bisect(f, lo, hi, BISECTION_WIDTH);
            return Ok(CrossProductRoot { radius_ratio: r, mu, residual: f(mu) });
        }
        lo = hi;
        flo = fhi;
    }
    Err(crate::error::Error::NoConvergence(format!(
        "no sign change of the cross-product below {ceiling} for r = {r}"
    )))
}

#[cfg(test)]
#[allow(clippy::excessive_precision)] // reference values quoted as tabulated
mod tests {
    use super::*;

    // (x, J0, J1, Y0, Y1) from 40-digit arbitrary-precision evaluation.
    const REFERENCE: [(f64, f64, f64, f64, f64); 14] = [
        (0.1, 0.997501562066040032, 0.049937526036242000321, -1.5342386513503668083, -6.4589510947020266377),
        (0.5, 0.93846980724081290423, 0.24226845767487388638, -0.44451873350670655715, -1.4714723926702430692),
        (1.0, 0.76519768655796655145, 0.44005058574493351596, 0.088256964215676957983, -0.78121282130028871655),
        (2.0, 0.22389077914123566805, 0.5767248077568733872, 0.5103756726497451196, -0.10703243154093754689),
        (3.0, -0.26005195490193343762, 0.33905895852593645893, 0.37685001001279038197, 0.32467442479179997844),
        (5.0, -0.17759677131433830435, -0.32757913759146522204, -0.30851762524903378007, 0.1478631433912268448),
        (7.5, 0.26633965788037839687, 0.13524842757970550518, 0.11731328614820863084, -0.2591285104861162518),
        (8.0, 0.17165080713755390609, 0.23463634685391462438, 0.22352148938756622053, -0.15806046173124749426),
        (10.0, -0.2459357644513483352, 0.04347274616886143667, 0.055671167283599391424, 0.24901542420695388392),
        (12.0, 0.047689310796833536624, -0.22344710449062761237, -0.22523731263436143369, -0.05709921826089652105),
        (15.0, -0.014224472826780773234, 0.20510403861352276115, 0.20546429603891826479, 0.02107362803687351194),
        (20.0, 0.16702466434058315473, 0.066833124175850045579, 0.062640596809383831162, -0.16551161436252129586),
        (35.0, -0.12684568275631256981, 0.04399094217962563997, 0.045797987195155641061, 0.12751273354559011719),
        (50.0, 0.055812327669251815005, -0.097511828125175137661, -0.098064995470077079029, -0.056795668562014767942),
    ];

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-2)
    }

    #[test]
    fn matches_high_precision_reference() {
        for &(x, rj0, rj1, ry0, ry1) in REFERENCE.iter() {
            assert!(close(j0(x), rj0, 1e-10), "J0({x}) = {} vs {rj0}", j0(x));
            assert!(close(j1(x), rj1, 1e-10), "J1({x}) = {} vs {rj1}", j1(x));
            assert!(close(y0(x), ry0, 1e-10), "Y0({x}) = {} vs {ry0}", y0(x));
            assert!(close(y1(x), ry1, 1e-10), "Y1({x}) = {} vs {ry1}", y1(x));
        }
    }

    #[test]
    fn identity_cases() {
        assert_eq!(j0(0.0), 1.0);
        assert_eq!(j1(0.0), 0.0);
        assert!(j0(2.405).abs() < 1e-3);
        assert!((j1(-1.0) + j1(1.0)).abs() < 1e-15);
        assert_eq!(j0(-3.0), j0(3.0));
    }

    #[test]
    fn second_kind_rejects_nonpositive() {
        assert!(bessel(BesselOrder::Zero, BesselKind::Second, 0.0).is_err());
        assert!(bessel(BesselOrder::One, BesselKind::Second, -1.0).is_err());
        assert!(bessel(BesselOrder::Zero, BesselKind::First, f64::NAN).is_err());
        assert!(BesselOrder::from_int(2).is_err());
    }

    #[test]
    fn second_kind_diverges_at_origin() {
        assert!(y0(1e-8) < -10.0);
        assert!(y0(1e-12) < y0(1e-8));
    }

    #[test]
    fn branches_agree_in_overlap_band() {
        let mut x = 10.0;
        while x <= 14.0 {
            for order in [BesselOrder::Zero, BesselOrder::One] {
                let (ja, ya) = hankel(order, x);
                let js = j_series(order, x);
                let ys = y_series(order, x);
                assert!((ja - js).abs() < 1e-10, "J{order:?} at {x}: {ja} vs {js}");
                assert!((ya - ys).abs() < 1e-10, "Y{order:?} at {x}: {ya} vs {ys}");
            }
            x += 0.05;
        }
    }

    #[test]
    fn wronskian_identity() {
        let mut x = 0.1;
        while x <= 50.0 {
            let w = j1(x) * y0(x) - j0(x) * y1(x);
            let expected = 2.0 / (PI * x);
            assert!(((w - expected) / expected).abs() < 1e-8, "x = {x}: {w} vs {expected}");
            x += 0.037;
        }
    }

    #[test]
    fn first_zeros() {
        let z0 = bessel_first_zero(BesselOrder::Zero);
        let z1 = bessel_first_zero(BesselOrder::One);
        assert!((z0 - 2.404_825_557_695_773).abs() < 1e-9);
        assert!((z1 - 3.831_705_970_207_512).abs() < 1e-9);
        assert!(j0(z0 - 1e-6) > 0.0 && j0(z0 + 1e-6) < 0.0);
    }

    #[test]
    fn cross_product_roots_match_reference() {
        // Reference roots from arbitrary-precision root finding.
        for (r, mu) in [
            (2.0, 3.123_030_919_595_69),
            (5.0 / 3.0, 4.697_064_088_336_56),
            (2.5, 2.073_228_849_054_94),
            (1.5, 6.270_235_215_795_34),
            (3.0, 1.548_458_778_289_45),
        ] {
            let root = cross_product_mu(r).unwrap();
            assert!((root.mu - mu).abs() < 1e-8, "r = {r}: {} vs {mu}", root.mu);
            assert!(root.residual.abs() < 1e-8);
        }
    }

    #[test]
    fn cross_product_rejects_small_ratio() {
        assert!(cross_product_mu(1.0).is_err());
        assert!(cross_product_mu(0.5).is_err());
        assert!(cross_product_mu(f64::NAN).is_err());
    }

    #[test]
    fn mu_strictly_decreasing() {
        let mut prev = f64::INFINITY;
        for i in 0..=14 {
            let r = 1.2 + 0.2 * i as f64;
            let root = cross_product_mu(r).unwrap();
            assert!(root.mu < prev, "μ({r}) = {} not below {prev}", root.mu);
            assert!(root.residual.abs() <= 1e-8);
            // least-root certificate: no sign change on a fine grid below μ
            let mut l = 1e-3;
            let s = cross_product(l, r).signum();
            while l < root.mu - 1e-6 {
                assert_eq!(cross_product(l, r).signum(), s);
                l += 0.01;
            }
            prev = root.mu;
        }
    }
}
