//! Vibrating-string eigenproblems on an interval, exact node counting for
//! linear combinations of their eigenfunctions, and a finite-difference
//! Sturm–Liouville solver.

pub mod chebyshev;
pub mod sl;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::poly::Poly;
use crate::report::ExperimentReport;

pub use chebyshev::{chebyshev_expand, ChebyshevExpansion, ExpansionKind};
pub use sl::{sl_report, solve_sl, SlEigenpair, SlProblem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    /// `u(0) = u(π) = 0`
    Dirichlet,
    /// `u′(0) = u′(π) = 0`
    Neumann,
    /// `u(0) = u(2π)`, `u′(0) = u′(2π)`
    Periodic,
}

impl BoundaryCondition {
    pub const ALL: [BoundaryCondition; 3] =
        [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann, BoundaryCondition::Periodic];

    pub fn interval(self) -> (f64, f64) {
        match self {
            BoundaryCondition::Periodic => (0.0, 2.0 * std::f64::consts::PI),
            _ => (0.0, std::f64::consts::PI),
        }
    }

    /// Number of coefficients describing a combination over the first `n`
    /// eigenvalue levels.
    pub fn coefficient_count(self, n: usize) -> usize {
        match self {
            BoundaryCondition::Periodic => 2 * n - 1,
            _ => n,
        }
    }

    /// Largest node count allowed by the one-dimensional Herrmann bound for
    /// combinations over the first `n` levels.
    pub fn node_bound(self, n: usize) -> usize {
        match self {
            BoundaryCondition::Periodic => 2 * (n - 1),
            _ => n - 1,
        }
    }
}

impl std::str::FromStr for BoundaryCondition {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dirichlet" => Ok(BoundaryCondition::Dirichlet),
            "neumann" => Ok(BoundaryCondition::Neumann),
            "periodic" => Ok(BoundaryCondition::Periodic),
            other => domain(format!("unknown boundary condition '{other}'")),
        }
    }
}

impl std::fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::Neumann => "neumann",
            BoundaryCondition::Periodic => "periodic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trig {
    Sin,
    Cos,
}

/// `amplitude · trig(frequency · x)`; frequency 0 with `Cos` is the constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigMode {
    pub trig: Trig,
    pub frequency: u32,
}

impl TrigMode {
    pub fn eval(&self, x: f64) -> f64 {
        let a = self.frequency as f64 * x;
        match self.trig {
            Trig::Sin => a.sin(),
            Trig::Cos => a.cos(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StringEigenpair {
    pub bc: BoundaryCondition,
    pub index: usize,
    pub eigenvalue: f64,
    pub multiplicity: usize,
    /// Basis of the eigenspace.
    pub modes: Vec<TrigMode>,
}

/// Closed-form `n`-th eigenpair (`n ≥ 1`).
pub fn string_eigenpair(bc: BoundaryCondition, n: usize) -> Result<StringEigenpair> {
    if n < 1 {
        return domain("eigen-index must be at least 1");
    }
    let (eigenvalue, modes) = match bc {
        BoundaryCondition::Dirichlet => {
            ((n * n) as f64, vec![TrigMode { trig: Trig::Sin, frequency: n as u32 }])
        }
        BoundaryCondition::Neumann => {
            let k = (n - 1) as u32;
            ((k * k) as f64, vec![TrigMode { trig: Trig::Cos, frequency: k }])
        }
        BoundaryCondition::Periodic => {
            let k = (n - 1) as u32;
            if k == 0 {
                (0.0, vec![TrigMode { trig: Trig::Cos, frequency: 0 }])
            } else {
                (
                    (k * k) as f64,
                    vec![TrigMode { trig: Trig::Sin, frequency: k }, TrigMode { trig: Trig::Cos, frequency: k }],
                )
            }
        }
    };
    Ok(StringEigenpair { bc, index: n, eigenvalue, multiplicity: modes.len(), modes })
}

/// Linear combination of the eigenfunctions of the first `levels` eigenvalues.
///
/// Dirichlet: `Σ C_k sin kx`; Neumann: `Σ C_k cos (k−1)x`, both on `(0, π)`.
/// Periodic on `(0, 2π)`: coefficients `[a₀, a₁, b₁, a₂, b₂, …]` of
/// `a₀ + Σ_j (a_j cos jx + b_j sin jx)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CombinationSpec {
    pub bc: BoundaryCondition,
    pub coefficients: Vec<f64>,
}

impl CombinationSpec {
    pub fn new(bc: BoundaryCondition, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return domain("combination needs at least one coefficient");
        }
        if bc == BoundaryCondition::Periodic && coefficients.len().is_multiple_of(2) {
            return domain("periodic combinations take 2n−1 coefficients [a0, a1, b1, …]");
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return domain("coefficients must be finite");
        }
        if coefficients.iter().all(|&c| c == 0.0) {
            return domain("all coefficients are zero");
        }
        Ok(CombinationSpec { bc, coefficients })
    }

    /// Number of eigenvalue levels spanned.
    pub fn levels(&self) -> usize {
        match self.bc {
            BoundaryCondition::Periodic => self.coefficients.len().div_ceil(2),
            _ => self.coefficients.len(),
        }
    }

    /// Direct trigonometric evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let c = &self.coefficients;
        match self.bc {
            BoundaryCondition::Dirichlet => {
                c.iter().enumerate().map(|(k, ck)| ck * ((k + 1) as f64 * x).sin()).sum()
            }
            BoundaryCondition::Neumann => c.iter().enumerate().map(|(k, ck)| ck * (k as f64 * x).cos()).sum(),
            BoundaryCondition::Periodic => {
                let mut s = c[0];
                for j in 1..self.levels() {
                    let a = j as f64 * x;
                    s += c[2 * j - 1] * a.cos() + c[2 * j] * a.sin();
                }
                s
            }
        }
    }

    /// `(A, B)` with the combination equal to `A(cos x) + sin x · B(cos x)`.
    pub fn cos_polynomials(&self) -> (Poly, Poly) {
        let expand = |n, kind| chebyshev_expand(n, kind).expect("valid expansion index").poly();
        let mut a = Poly::constant(0.0);
        let mut b = Poly::constant(0.0);
        let c = &self.coefficients;
        match self.bc {
            BoundaryCondition::Dirichlet => {
                for (k, &ck) in c.iter().enumerate() {
                    b = &b + &(&expand(k + 1, ExpansionKind::Dirichlet) * ck);
                }
            }
            BoundaryCondition::Neumann => {
                a = Poly::constant(c[0]);
                for (k, &ck) in c.iter().enumerate().skip(1) {
                    a = &a + &(&expand(k + 1, ExpansionKind::Neumann) * ck);
                }
            }
            BoundaryCondition::Periodic => {
                a = Poly::constant(c[0]);
                for j in 1..self.levels() {
                    // cos jx from the Neumann formula at n = j+1, sin jx from
                    // the Dirichlet formula at n = j.
                    a = &a + &(&expand(j + 1, ExpansionKind::Neumann) * c[2 * j - 1]);
                    b = &b + &(&expand(j, ExpansionKind::Dirichlet) * c[2 * j]);
                }
            }
        }
        (a, b)
    }
}

/// Number of nodes (interior sign changes) of the combination, by exact
/// root isolation of its polynomial representation.
pub fn count_combination_nodes(spec: &CombinationSpec) -> Result<usize> {
    if spec.coefficients.iter().all(|&c| c == 0.0) {
        return domain("all coefficients are zero");
    }
    let (a, b) = spec.cos_polynomials();
    Ok(match spec.bc {
        // sin x > 0 on (0, π) and cos is a monotone bijection onto (−1, 1).
        BoundaryCondition::Dirichlet => b.count_sign_changes(-1.0, 1.0),
        BoundaryCondition::Neumann => a.count_sign_changes(-1.0, 1.0),
        BoundaryCondition::Periodic => periodic_nodes(&a, &b, spec.levels()),
    })
}

/// Nodes on `(0, 2π)` of `A(cos x) + sin x · B(cos x)` through the half-angle
/// map `t = tan(x/2)`: `(0, π) ↦ (0, ∞)`, `(π, 2π) ↦ (−∞, 0)`.
fn periodic_nodes(a: &Poly, b: &Poly, levels: usize) -> usize {
    let m = levels - 1;
    if m == 0 {
        return 0;
    }
    let num = Poly::new(vec![1.0, 0.0, -1.0]); // 1 − t²
    let den = Poly::new(vec![1.0, 0.0, 1.0]); // 1 + t²
    let mut p = Poly::constant(0.0);
    for (k, &ak) in a.coeffs().iter().enumerate() {
        if ak != 0.0 && k <= m {
            p = &p + &(&(&num.pow(k) * &den.pow(m - k)) * ak);
        }
    }
    let two_t = Poly::new(vec![0.0, 2.0]);
    for (k, &bk) in b.coeffs().iter().enumerate() {
        if bk != 0.0 && k < m {
            let term = &(&two_t * &num.pow(k)) * &den.pow(m - 1 - k);
            p = &p + &(&term * bk);
        }
    }
    let p = p.trimmed(1e-13);
    if p.degree() == 0 {
        return 0;
    }
    let r = p.root_bound() + 1.0;
    let finite = p
        .sign_change_points(-r, r)
        .into_iter()
        .filter(|t| t.abs() > 1e-12) // t = 0 is x = 0 ≡ 2π, an endpoint
        .count();
    // Through t = ±∞ (x = π) the sign flips iff the degree is odd.
    let at_pi = usize::from(p.eval(r).signum() != p.eval(-r).signum());
    finite + at_pi
}

/// Outcome of a randomized Herrmann-bound scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HerrmannScan {
    pub bc: BoundaryCondition,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub bound: usize,
    pub max_nodes: usize,
    /// `histogram[k]` = number of trials with exactly `k` nodes.
    pub histogram: Vec<usize>,
    /// `(trial, node count)` for every trial exceeding the bound.
    pub violations: Vec<(usize, usize)>,
}

impl HerrmannScan {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_report(&self) -> ExperimentReport {
        let mut r = ExperimentReport::new("herrmann");
        r.config("bc", self.bc.to_string())
            .config("n", self.n)
            .config("trials", self.trials)
            .config("seed", self.seed);
        r.result("bound", self.bound)
            .result("max_nodes", self.max_nodes)
            .result("histogram", &self.histogram)
            .result("violations", &self.violations);
        r.check(
            "herrmann_bound_1d",
            self.passed(),
            format!(
                "max node count {} over {} trials, bound {} ({} violations)",
                self.max_nodes,
                self.trials,
                self.bound,
                self.violations.len()
            ),
        );
        r
    }
}

/// Random coefficient vector for trial `trial`, uniform on `[−1, 1]^m`
/// excluding the zero vector; independent of scheduling.
pub fn trial_coefficients(bc: BoundaryCondition, n: usize, seed: u64, trial: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let m = bc.coefficient_count(n);
    loop {
        let c: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        if c.iter().any(|&v| v != 0.0) {
            return c;
        }
    }
}

/// Draw `trials` random combinations over the first `n` levels and check
/// that none has more nodes than the one-dimensional bound.
pub fn herrmann_scan(bc: BoundaryCondition, n: usize, trials: usize, seed: u64) -> Result<HerrmannScan> {
    if n < 1 {
        return domain("n must be at least 1");
    }
    if trials < 1 {
        return domain("trials must be at least 1");
    }
    let counts: Vec<usize> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let spec = CombinationSpec::new(bc, trial_coefficients(bc, n, seed, t)).expect("nonzero coefficients");
            count_combination_nodes(&spec).expect("valid combination")
        })
        .collect();
    let bound = bc.node_bound(n);
    let max_nodes = counts.iter().copied().max().unwrap_or(0);
    let mut histogram = vec![0; max_nodes + 1];
    for &c in &counts {
        histogram[c] += 1;
    }
    let violations = counts.iter().enumerate().filter(|(_, &c)| c > bound).map(|(t, &c)| (t, c)).collect();
    Ok(HerrmannScan { bc, n, trials, seed, bound, max_nodes, histogram, violations })
}

/// Node existence for two-term combinations `C₁u₁ + C₂u₂` swept across
/// the critical ratio `|C₁/C₂|` (2 for Dirichlet, 1 for Neumann).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdSweep {
    pub bc: BoundaryCondition,
    pub threshold: f64,
    pub step: f64,
    pub samples: usize,
    /// Ratios (signed) where the node count disagrees with `ratio < threshold`.
    pub mismatches: Vec<f64>,
}

impl ThresholdSweep {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Critical `|C₁/C₂|` below which a two-term combination has a node.
pub fn node_threshold(bc: BoundaryCondition) -> Option<f64> {
    match bc {
        BoundaryCondition::Dirichlet => Some(2.0),
        BoundaryCondition::Neumann => Some(1.0),
        BoundaryCondition::Periodic => None,
    }
}

/// Sweep `|C₁/C₂|` over `threshold ± half_steps·step` with both signs of `C₁`.
pub fn threshold_sweep(bc: BoundaryCondition, step: f64, half_steps: usize) -> Result<ThresholdSweep> {
    let Some(threshold) = node_threshold(bc) else {
        return domain("the periodic problem has no two-term node threshold");
    };
    if !(step > 0.0) {
        return domain("sweep step must be positive");
    }
    let mut mismatches = Vec::new();
    let mut samples = 0;
    let h = half_steps as i64;
    for i in -h..=h {
        let ratio = threshold + i as f64 * step;
        for sign in [1.0, -1.0] {
            let nodes = count_combination_nodes(&CombinationSpec::new(bc, vec![sign * ratio, 1.0])?)?;
            samples += 1;
            if (nodes > 0) != (ratio < threshold) {
                mismatches.push(sign * ratio);
            }
        }
    }
    Ok(ThresholdSweep { bc, threshold, step, samples, mismatches })
}

/// Eigenpairs, expansion check, threshold sweep and (optionally) the node
/// count of one combination, as a report.
pub fn string_report(bc: BoundaryCondition, n: usize, coefficients: Option<Vec<f64>>) -> Result<ExperimentReport> {
    let pairs = (1..=n).map(|k| string_eigenpair(bc, k)).collect::<Result<Vec<_>>>()?;
    let mut r = ExperimentReport::new("string");
    r.config("bc", bc.to_string()).config("n", n);
    r.result("eigenpairs", &pairs);
    let kind = match bc {
        BoundaryCondition::Dirichlet => Some(ExpansionKind::Dirichlet),
        BoundaryCondition::Neumann => Some(ExpansionKind::Neumann),
        BoundaryCondition::Periodic => None,
    };
    if let Some(kind) = kind {
        let first = if kind == ExpansionKind::Neumann { 2 } else { 1 };
        let mut worst = 0.0f64;
        for k in first..=n.max(first) {
            let e = chebyshev_expand(k, kind)?;
            for i in 0..=1000 {
                let x = std::f64::consts::PI * i as f64 / 1000.0;
                worst = worst.max((e.eval(x) - e.closed_form(x)).abs());
            }
        }
        r.result("expansion_max_error", worst);
        r.check("expansion_consistency", worst <= 1e-12, format!("max |expansion − closed form| = {worst:.3e}"));
        let sweep = threshold_sweep(bc, 1e-3, 50)?;
        r.result("threshold_sweep", &sweep);
        r.check(
            "threshold_sharpness",
            sweep.passed(),
            format!(
                "node exists iff |C₁/C₂| < {} over {} sweep points ({} mismatches)",
                sweep.threshold,
                sweep.samples,
                sweep.mismatches.len()
            ),
        );
    }
    if let Some(c) = coefficients {
        r.config("coefficients", &c);
        let spec = CombinationSpec::new(bc, c)?;
        let nodes = count_combination_nodes(&spec)?;
        let bound = bc.node_bound(spec.levels());
        r.result("nodes", nodes).result("node_bound", bound);
        r.check("herrmann_bound_1d", nodes <= bound, format!("{nodes} nodes, bound {bound}"));
    }
    Ok(r)
}
