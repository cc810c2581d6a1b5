//! Expansions of `sin nx` and `cos (n−1)x` as polynomials in `cos x`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::poly::Poly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExpansionKind {
    /// `sin nx = sin x · P(cos x)`
    Dirichlet,
    /// `cos (n−1)x = Q(cos x)`
    Neumann,
}

/// Polynomial in `c = cos x`, optionally multiplied by `sin x`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChebyshevExpansion {
    pub n: usize,
    pub kind: ExpansionKind,
    pub sin_prefactor: bool,
    /// Monomial coefficients in ascending powers of `cos x`.
    pub coefficients: Vec<f64>,
}

impl ChebyshevExpansion {
    pub fn poly(&self) -> Poly {
        Poly::new(self.coefficients.clone())
    }

    pub fn degree(&self) -> usize {
        self.poly().degree()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let p = self.poly().eval(x.cos());
        if self.sin_prefactor {
            x.sin() * p
        } else {
            p
        }
    }

    /// The trigonometric function the expansion represents.
    pub fn closed_form(&self, x: f64) -> f64 {
        match self.kind {
            ExpansionKind::Dirichlet => (self.n as f64 * x).sin(),
            ExpansionKind::Neumann => ((self.n - 1) as f64 * x).cos(),
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64).round()
}

/// Expand `sin nx` (Dirichlet, `n ≥ 1`) or `cos (n−1)x` (Neumann, `n ≥ 2`).
pub fn chebyshev_expand(n: usize, kind: ExpansionKind) -> Result<ChebyshevExpansion> {
    let mut coefficients = vec![0.0; n.max(1)];
    match kind {
        ExpansionKind::Dirichlet => {
            if n < 1 {
                return domain("Dirichlet expansion needs n ≥ 1");
            }
            // sin nx = sin x Σ_k (−1)^k C(n−k−1, k) (2 cos x)^{n−2k−1}
            for k in 0..=(n - 1) / 2 {
                let power = n - 2 * k - 1;
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                coefficients[power] += sign * binomial(n - k - 1, k) * 2f64.powi(power as i32);
            }
        }
        ExpansionKind::Neumann => {
            if n < 2 {
                return domain("Neumann expansion of cos (n−1)x needs n ≥ 2");
            }
            // cos (n−1)x = 2^{n−2} cos^{n−1} x
            //   + (n−1)/2 Σ_{k≥1} (−1)^k / k C(n−k−2, k−1) (2 cos x)^{n−2k−1}
            coefficients[n - 1] += 2f64.powi(n as i32 - 2);
            let half = (n - 1) as f64 / 2.0;
            for k in 1..=(n - 1) / 2 {
                let power = n - 2 * k - 1;
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                coefficients[power] +=
                    half * sign / k as f64 * binomial(n - k - 2, k - 1) * 2f64.powi(power as i32);
            }
        }
    }
    Ok(ChebyshevExpansion { n, kind, sin_prefactor: kind == ExpansionKind::Dirichlet, coefficients })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        let e = chebyshev_expand(2, ExpansionKind::Dirichlet).unwrap();
        assert_eq!(e.coefficients, vec![0.0, 2.0]);
        let e = chebyshev_expand(1, ExpansionKind::Dirichlet).unwrap();
        assert_eq!(e.coefficients, vec![1.0]);
        let e = chebyshev_expand(3, ExpansionKind::Neumann).unwrap();
        assert_eq!(e.coefficients, vec![-1.0, 0.0, 2.0]);
        let e = chebyshev_expand(5, ExpansionKind::Neumann).unwrap();
        // cos 4x = 8c⁴ − 8c² + 1
        assert_eq!(e.coefficients, vec![1.0, 0.0, -8.0, 0.0, 8.0]);
    }

    #[test]
    fn out_of_range() {
        assert!(chebyshev_expand(0, ExpansionKind::Dirichlet).is_err());
        assert!(chebyshev_expand(1, ExpansionKind::Neumann).is_err());
    }

    #[test]
    fn neumann_five_reproduces_cos4x() {
        let e = chebyshev_expand(5, ExpansionKind::Neumann).unwrap();
        for i in 0..1000 {
            let x = std::f64::consts::PI * i as f64 / 999.0;
            assert!((e.eval(x) - (4.0 * x).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn reproduces_closed_forms_up_to_twelve() {
        for n in 1..=12 {
            for kind in [ExpansionKind::Dirichlet, ExpansionKind::Neumann] {
                let Ok(e) = chebyshev_expand(n, kind) else { continue };
                assert_eq!(e.degree(), n - 1, "n={n} {kind:?}");
                for i in 0..=400 {
                    let x = 2.0 * std::f64::consts::PI * i as f64 / 400.0;
                    assert!(
                        (e.eval(x) - e.closed_form(x)).abs() < 1e-12,
                        "n={n} {kind:?} x={x}: {} vs {}",
                        e.eval(x),
                        e.closed_form(x)
                    );
                }
            }
        }
    }
}
