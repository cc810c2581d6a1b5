//! `−u″ + q u = λ u` on `(0, ℓ)` with Dirichlet ends, discretized by the
//! three-point stencil on a uniform grid.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::report::ExperimentReport;

/// Minimum number of potential samples (endpoints included).
pub const MIN_SAMPLES: usize = 100;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlProblem {
    pub length: f64,
    /// `q` sampled at `x_i = i ℓ / (len − 1)`, endpoints included.
    pub potential: Vec<f64>,
}

impl SlProblem {
    pub fn new(length: f64, potential: Vec<f64>) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return domain("length must be positive");
        }
        if potential.len() < MIN_SAMPLES {
            return domain(format!("potential needs at least {MIN_SAMPLES} samples"));
        }
        // q ≡ 0 is admitted as the reference string case.
        if potential.iter().any(|q| !q.is_finite() || *q < 0.0) {
            return domain("potential must be finite and nonnegative");
        }
        Ok(SlProblem { length, potential })
    }

    pub fn from_fn(length: f64, samples: usize, q: impl Fn(f64) -> f64) -> Result<Self> {
        let h = length / (samples.max(2) - 1) as f64;
        Self::new(length, (0..samples).map(|i| q(i as f64 * h)).collect())
    }

    pub fn spacing(&self) -> f64 {
        self.length / (self.potential.len() - 1) as f64
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlEigenpair {
    pub index: usize,
    pub eigenvalue: f64,
    /// Interior grid abscissae.
    pub x: Vec<f64>,
    /// Unit-norm eigenvector on the interior grid, first nonzero entry positive.
    pub vector: Vec<f64>,
    pub sign_changes: usize,
}

/// Symmetric tridiagonal matrix with constant off-diagonal.
pub(crate) struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: f64,
}

impl Tridiagonal {
    /// Number of eigenvalues strictly below `sigma` (Sylvester inertia of the
    /// LDLᵀ factorization of `T − σI`).
    pub fn count_below(&self, sigma: f64) -> usize {
        let e2 = self.off * self.off;
        let mut count = 0;
        let mut pivot = 1.0;
        for (i, &d) in self.diag.iter().enumerate() {
            pivot = if i == 0 { d - sigma } else { d - sigma - e2 / pivot };
            if pivot == 0.0 {
                pivot = -f64::EPSILON * (d.abs() + sigma.abs()).max(1.0);
            }
            if pivot < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let r = 2.0 * self.off.abs();
        let lo = self.diag.iter().fold(f64::INFINITY, |m, d| m.min(d - r));
        let hi = self.diag.iter().fold(f64::NEG_INFINITY, |m, d| m.max(d + r));
        (lo, hi)
    }

    /// `k`-th smallest eigenvalue (0-based) by bisection on the inertia count.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Eigenvector for a converged eigenvalue by inverse iteration.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.diag.len();
        let scale = self.diag.iter().fold(0.0f64, |m, d| m.max(d.abs())) + self.off.abs();
        let shift = lambda + 1e-13 * scale;
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * ((i * 7919) % 13) as f64).collect();
        for _ in 0..4 {
            x = self.solve_shifted(shift, &x);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= norm);
        }
        if let Some(first) = x.iter().find(|v| v.abs() > 1e-8) {
            if *first < 0.0 {
                x.iter_mut().for_each(|v| *v = -*v);
            }
        }
        x
    }

    /// Solve `(T − σI) y = b` by the Thomas algorithm with tiny-pivot guard.
    fn solve_shifted(&self, sigma: f64, b: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let e = self.off;
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let guard = f64::EPSILON * (self.diag[0].abs() + e.abs()).max(1.0);
        let mut denom = self.diag[0] - sigma;
        if denom.abs() < guard {
            denom = guard;
        }
        c[0] = e / denom;
        d[0] = b[0] / denom;
        for i in 1..n {
            let mut denom = self.diag[i] - sigma - e * c[i - 1];
            if denom.abs() < guard {
                denom = guard;
            }
            c[i] = e / denom;
            d[i] = (b[i] - e * d[i - 1]) / denom;
        }
        let mut y = vec![0.0; n];
        y[n - 1] = d[n - 1];
        for i in (0..n - 1).rev() {
            y[i] = d[i] - c[i] * y[i + 1];
        }
        y
    }
}

/// Sign changes of a sampled vector, ignoring entries below `rel · max|v|`.
pub fn count_sign_changes(v: &[f64], rel: f64) -> usize {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut last = 0.0f64;
    let mut count = 0;
    for &x in v {
        if x.abs() <= rel * max {
            continue;
        }
        if last != 0.0 && x.signum() != last.signum() {
            count += 1;
        }
        last = x;
    }
    count
}

/// First `count` eigenpairs, eigenvalues strictly increasing.
///
/// Fails with a resolution error when two neighbouring eigenvalues are closer
/// than the O(h²) discretization-error estimate `λ²h²/12` of either.
pub fn solve_sl(problem: &SlProblem, count: usize) -> Result<Vec<SlEigenpair>> {
    if count < 1 {
        return domain("count must be at least 1");
    }
    let h = problem.spacing();
    let interior = problem.potential.len() - 2;
    if count > interior {
        return Err(Error::Resolution(format!("{count} eigenpairs requested from {interior} interior points")));
    }
    let inv_h2 = 1.0 / (h * h);
    let tri = Tridiagonal {
        diag: problem.potential[1..=interior].iter().map(|q| 2.0 * inv_h2 + q).collect(),
        off: -inv_h2,
    };
    let x: Vec<f64> = (1..=interior).map(|i| i as f64 * h).collect();
    let mut pairs = Vec::with_capacity(count);
    for k in 0..count {
        let eigenvalue = tri.eigenvalue(k);
        let vector = tri.eigenvector(eigenvalue);
        let sign_changes = count_sign_changes(&vector, 1e-10);
        pairs.push(SlEigenpair { index: k + 1, eigenvalue, x: x.clone(), vector, sign_changes });
    }
    let err = |l: f64| l * l * h * h / 12.0;
    for w in pairs.windows(2) {
        let (a, b) = (w[0].eigenvalue, w[1].eigenvalue);
        if b - a < err(a).max(err(b)) {
            return Err(Error::Resolution(format!(
                "eigenvalues {a} and {b} are closer than the discretization error estimate"
            )));
        }
    }
    Ok(pairs)
}

/// Spectrum of `problem` with Sturm-oscillation and ordering checks, plus a
/// Richardson estimate from a run at twice the resolution.
pub fn sl_report(problem: &SlProblem, count: usize, potential: &str) -> Result<ExperimentReport> {
    let pairs = solve_sl(problem, count)?;
    let fine_samples = 2 * (problem.potential.len() - 1) + 1;
    let q = |x: f64| {
        // linear interpolation of the sampled potential
        let t = (x / problem.spacing()).min((problem.potential.len() - 1) as f64);
        let i = (t.floor() as usize).min(problem.potential.len() - 2);
        let f = t - i as f64;
        problem.potential[i] * (1.0 - f) + problem.potential[i + 1] * f
    };
    let fine = solve_sl(&SlProblem::from_fn(problem.length, fine_samples, q)?, count)?;
    let extrapolated: Vec<f64> = pairs.iter().zip(&fine).map(|(c, f)| (4.0 * f.eigenvalue - c.eigenvalue) / 3.0).collect();
    let mut r = ExperimentReport::new("sl");
    r.config("length", problem.length)
        .config("samples", problem.potential.len())
        .config("potential", potential)
        .config("count", count);
    r.result("eigenvalues", pairs.iter().map(|p| p.eigenvalue).collect::<Vec<_>>())
        .result("sign_changes", pairs.iter().map(|p| p.sign_changes).collect::<Vec<_>>())
        .result("richardson", &extrapolated);
    let oscillation = pairs.iter().all(|p| p.sign_changes == p.index - 1);
    r.check("sturm_oscillation", oscillation, "n-th eigenvector has n − 1 interior sign changes");
    let increasing = pairs.windows(2).all(|w| w[0].eigenvalue < w[1].eigenvalue);
    r.check("strictly_increasing", increasing, "eigenvalues strictly increase with index");
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn free_string_spectrum() {
        let p = SlProblem::from_fn(PI, 2001, |_| 0.0).unwrap();
        let pairs = solve_sl(&p, 3).unwrap();
        for (k, pair) in pairs.iter().enumerate() {
            let exact = ((k + 1) * (k + 1)) as f64;
            assert!((pair.eigenvalue - exact).abs() / exact < 5e-3);
            assert_eq!(pair.sign_changes, k);
        }
    }

    #[test]
    fn constant_potential_shifts_spectrum() {
        let base = solve_sl(&SlProblem::from_fn(PI, 500, |_| 0.0).unwrap(), 4).unwrap();
        let shifted = solve_sl(&SlProblem::from_fn(PI, 500, |_| 3.5).unwrap(), 4).unwrap();
        for (a, b) in base.iter().zip(&shifted) {
            assert!((b.eigenvalue - a.eigenvalue - 3.5).abs() < 1e-9);
        }
    }

    #[test]
    fn discrete_eigenvalues_match_closed_form() {
        // Three-point stencil spectrum: (4/h²) sin²(kh/2)
        let p = SlProblem::from_fn(PI, 201, |_| 0.0).unwrap();
        let h = p.spacing();
        for pair in solve_sl(&p, 6).unwrap() {
            let k = pair.index as f64;
            let exact = 4.0 / (h * h) * (k * h / 2.0).sin().powi(2);
            assert!((pair.eigenvalue - exact).abs() < 1e-9 * exact);
        }
    }

    #[test]
    fn eigenvectors_have_unit_norm_and_residual() {
        let p = SlProblem::from_fn(1.0, 400, |x| 1.0 + x * x).unwrap();
        let h = p.spacing();
        for pair in solve_sl(&p, 5).unwrap() {
            let v = &pair.vector;
            let n = v.len();
            let norm: f64 = v.iter().map(|a| a * a).sum();
            assert!((norm - 1.0).abs() < 1e-12);
            let mut res = 0.0;
            for i in 0..n {
                let left = if i > 0 { v[i - 1] } else { 0.0 };
                let right = if i + 1 < n { v[i + 1] } else { 0.0 };
                let q = p.potential[i + 1];
                let av = (2.0 * v[i] - left - right) / (h * h) + q * v[i];
                res += (av - pair.eigenvalue * v[i]).powi(2);
            }
            assert!(res.sqrt() < 1e-6 * pair.eigenvalue, "residual {}", res.sqrt());
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SlProblem::new(1.0, vec![1.0; 50]).is_err());
        assert!(SlProblem::new(-1.0, vec![1.0; 200]).is_err());
        assert!(SlProblem::new(1.0, vec![-1.0; 200]).is_err());
        let p = SlProblem::from_fn(1.0, 100, |_| 1.0).unwrap();
        assert!(solve_sl(&p, 0).is_err());
        assert!(solve_sl(&p, 99).is_err());
    }

    #[test]
    fn under_resolution_flagged() {
        // With 100 samples on a long interval the upper spectrum crowds below
        // its discretization error.
        let p = SlProblem::from_fn(1.0, 100, |_| 0.0).unwrap();
        assert!(matches!(solve_sl(&p, 90), Err(Error::Resolution(_))));
    }
}
