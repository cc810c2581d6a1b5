//! Dense real polynomials and exact counting of sign changes on an interval.
//!
//! Sign changes are located by recursive isolation: the odd-multiplicity
//! roots of `p′` split the interval into pieces on which `p` is monotone, and
//! each piece holds at most one crossing. Touching zeros (even multiplicity)
//! never produce a sign change and are not reported.

use std::ops::{Add, Mul};

/// Values within this fraction of the evaluation scale count as zero.
pub const ZERO_RELATIVE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    /// Ascending coefficients.
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Poly { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Poly::new(vec![c])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// `Σ |a_i| |x|^i`, the rounding scale of [`Poly::eval`] at `x`.
    pub fn scale(&self, x: f64) -> f64 {
        let ax = x.abs();
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * ax + c.abs())
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::constant(0.0);
        }
        Poly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, &c)| i as f64 * c).collect())
    }

    /// Drop leading coefficients that are negligible against the largest one.
    pub fn trimmed(&self, rel: f64) -> Poly {
        let max = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let mut c = self.coeffs.clone();
        while c.len() > 1 && c.last().unwrap().abs() <= rel * max {
            c.pop();
        }
        Poly::new(c)
    }

    /// Cauchy bound: every real root lies in `[-R, R]`.
    pub fn root_bound(&self) -> f64 {
        let lead = *self.coeffs.last().unwrap();
        let ratio = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .fold(0.0f64, |m, c| m.max((c / lead).abs()));
        1.0 + ratio
    }

    fn is_negligible(&self, x: f64, value: f64) -> bool {
        value.abs() <= ZERO_RELATIVE * self.scale(x)
    }

    fn sign_at(&self, x: f64) -> i8 {
        let v = self.eval(x);
        if self.is_negligible(x, v) {
            0
        } else if v > 0.0 {
            1
        } else {
            -1
        }
    }

    /// Points in `(a, b)` where `p` changes sign, ascending.
    pub fn sign_change_points(&self, a: f64, b: f64) -> Vec<f64> {
        if self.degree() == 0 || !(a < b) {
            return Vec::new();
        }
        let mut knots = vec![a];
        knots.extend(self.derivative().sign_change_points(a, b));
        knots.push(b);
        let mut roots = Vec::new();
        // (position, sign) of the last non-negligible knot
        let mut last: Option<(f64, i8)> = None;
        for &k in &knots {
            let s = self.sign_at(k);
            if s == 0 {
                continue;
            }
            if let Some((pos, ls)) = last {
                if ls != s {
                    roots.push(self.bisect(pos, k, ls));
                }
            }
            last = Some((k, s));
        }
        roots
    }

    /// Number of sign changes (odd-multiplicity roots) in the open interval.
    pub fn count_sign_changes(&self, a: f64, b: f64) -> usize {
        self.sign_change_points(a, b).len()
    }

    fn bisect(&self, mut lo: f64, mut hi: f64, sign_lo: i8) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let v = self.eval(mid);
            if v == 0.0 {
                return mid;
            }
            if (v > 0.0) == (sign_lo > 0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).copied().unwrap_or(0.0) + rhs.coeffs.get(i).copied().unwrap_or(0.0))
                .collect(),
        )
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Mul<f64> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * rhs).collect())
    }
}

impl Poly {
    pub fn pow(&self, k: usize) -> Poly {
        (0..k).fold(Poly::constant(1.0), |acc, _| &acc * self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn simple_roots() {
        // (x − 0.5)(x + 0.25)
        let p = &Poly::new(vec![-0.5, 1.0]) * &Poly::new(vec![0.25, 1.0]);
        let r = p.sign_change_points(-1.0, 1.0);
        assert_eq!(r.len(), 2);
        assert!((r[0] + 0.25).abs() < 1e-14);
        assert!((r[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn touching_roots_are_not_counted() {
        assert_eq!(Poly::new(vec![0.0, 0.0, 1.0]).count_sign_changes(-1.0, 1.0), 0);
        // x³ crosses
        assert_eq!(Poly::new(vec![0.0, 0.0, 0.0, 1.0]).count_sign_changes(-1.0, 1.0), 1);
        // (x − 0.3)² (x + 0.6)
        let sq = Poly::new(vec![-0.3, 1.0]).pow(2);
        let p = &sq * &Poly::new(vec![0.6, 1.0]);
        assert_eq!(p.count_sign_changes(-1.0, 1.0), 1);
    }

    #[test]
    fn endpoint_roots_excluded() {
        let p = Poly::new(vec![1.0, 1.0]); // root at −1
        assert_eq!(p.count_sign_changes(-1.0, 1.0), 0);
        let p = Poly::new(vec![-1.0, 0.0, 1.0]); // roots ±1
        assert_eq!(p.count_sign_changes(-1.0, 1.0), 0);
    }

    #[test]
    fn cauchy_bound_contains_roots() {
        let p = &Poly::new(vec![-7.0, 1.0]) * &Poly::new(vec![3.0, 1.0]);
        let r = p.root_bound();
        assert!(r >= 7.0);
        assert_eq!(p.count_sign_changes(-r, r), 2);
    }

    proptest! {
        // Products of distinct linear factors: every root is a sign change.
        #[test]
        fn counts_match_constructed_roots(mut roots in proptest::collection::vec(-0.99f64..0.99, 1..8)) {
            roots.sort_by(f64::total_cmp);
            roots.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
            let p = roots.iter().fold(Poly::constant(1.0), |acc, r| &acc * &Poly::new(vec![-r, 1.0]));
            let found = p.sign_change_points(-1.0, 1.0);
            prop_assert_eq!(found.len(), roots.len());
            for (f, r) in found.iter().zip(&roots) {
                prop_assert!((f - r).abs() < 1e-6);
            }
        }
    }
}
