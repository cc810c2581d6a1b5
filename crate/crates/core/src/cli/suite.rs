//! The verification battery: thirteen numbered criteria, each producing its
//! own report, folded into one aggregate report.

use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::eig2d::{
    alessandrini_check, annulus_comparison, convergence_study, courant_violations, interlacing_check, payne_experiment,
    pleijel_square_scan, solve_domain, DomainSpec,
};
use crate::error::Result;
use crate::nodal::nodal_domain_report;
use crate::report::{ExperimentReport, Status};
use crate::sloshing::{identity_check, rectangular_canal_modes, refinement_check, trace_counterexample, SloshingParams, TraceWindow};
use crate::specfun::{bessel_first_zero, BesselOrder};
use crate::string1d::{herrmann_scan, threshold_sweep, BoundaryCondition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// Grids capped at h = 1/64, 10³ random trials.
    Quick,
    /// Grids down to h = 1/128, 10⁴ random trials.
    Full,
}

impl Profile {
    fn finest_h(self) -> f64 {
        match self {
            Profile::Quick => 1.0 / 64.0,
            Profile::Full => 1.0 / 128.0,
        }
    }

    /// Verdict for a tolerance stated at h = 1/128: checked in the full
    /// profile, only recorded on the capped quick grids.
    fn fine_grid_check(self, r: &mut ExperimentReport, invariant: &str, ok: bool, detail: String) {
        match self {
            Profile::Full => {
                r.check(invariant, ok, detail);
            }
            Profile::Quick => {
                r.observe(invariant, format!("{detail}; tolerance is stated for h = 1/128, not checked on quick grids"));
            }
        }
    }

    fn trials(self) -> usize {
        match self {
            Profile::Quick => 1_000,
            Profile::Full => 10_000,
        }
    }
}

/// `(number, name)` of every criterion, in order.
pub const CRITERIA: [(usize, &str); 13] = [
    (1, "bessel_zeros"),
    (2, "cross_product_roots"),
    (3, "herrmann_1d"),
    (4, "threshold_sharpness"),
    (5, "sloshing_identity"),
    (6, "counterexample_m3"),
    (7, "node_counts_m5"),
    (8, "disc_spectrum"),
    (9, "annulus_cross_validation"),
    (10, "courant_counting"),
    (11, "pleijel_square"),
    (12, "alessandrini"),
    (13, "payne"),
];

pub const SEED: u64 = 1;

/// Copy every verdict of `sub` into `into`, prefixing invariant names.
fn absorb(into: &mut ExperimentReport, prefix: &str, sub: &ExperimentReport) {
    into.result(prefix, &sub.results);
    for v in &sub.verdicts {
        into.verdict(&format!("{prefix}.{}", v.invariant), v.status, v.detail.clone());
    }
}

fn runtime(r: &mut ExperimentReport, start: Instant, budget: f64) {
    let t = start.elapsed().as_secs_f64();
    r.check("runtime", t < budget, format!("{t:.2}s (budget {budget}s)"));
}

fn c01() -> Result<ExperimentReport> {
    let start = Instant::now();
    let mut r = ExperimentReport::new("bessel_zeros");
    for (order, name, expected) in [(BesselOrder::Zero, "j01", 2.405), (BesselOrder::One, "j11", 3.832)] {
        let z = bessel_first_zero(order);
        r.result(name, z);
        r.check(name, (z - expected).abs() <= 1e-3, format!("{z:.10} vs {expected}"));
    }
    runtime(&mut r, start, 1.0);
    Ok(r)
}

fn c02() -> Result<ExperimentReport> {
    let start = Instant::now();
    let mut r = ExperimentReport::new("cross_product_roots");
    for (label, radius, expected, holds) in [("2", 2.0, 3.123, true), ("5/3", 5.0 / 3.0, 4.697, false), ("5/2", 2.5, 2.073, false)] {
        let c = interlacing_check(radius, None)?;
        r.result(&format!("mu({label})"), c.mu);
        r.check(&format!("mu({label})"), (c.mu - expected).abs() <= 1e-2, format!("{:.6} vs {expected}", c.mu));
        r.check(
            &format!("interlacing({label})"),
            c.holds == holds,
            format!("interlacing {} (expected {})", if c.holds { "PASS" } else { "FAIL" }, if holds { "PASS" } else { "FAIL" }),
        );
    }
    runtime(&mut r, start, 1.0);
    Ok(r)
}

fn c03(profile: Profile) -> Result<ExperimentReport> {
    let start = Instant::now();
    let mut r = ExperimentReport::new("herrmann_1d");
    r.config("trials", profile.trials()).config("seed", SEED);
    for bc in BoundaryCondition::ALL {
        let mut worst = Vec::new();
        let mut violations = 0;
        for n in 1..=12 {
            let scan = herrmann_scan(bc, n, profile.trials(), SEED)?;
            worst.push((n, scan.max_nodes, scan.bound));
            violations += scan.violations.len();
        }
        r.result(&bc.to_string(), &worst);
        r.check(&bc.to_string(), violations == 0, format!("(n, max nodes, bound): {worst:?}"));
    }
    runtime(&mut r, start, 60.0);
    Ok(r)
}

fn c04() -> Result<ExperimentReport> {
    let mut r = ExperimentReport::new("threshold_sharpness");
    for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
        let s = threshold_sweep(bc, 1e-3, 100)?;
        r.check(
            &bc.to_string(),
            s.passed(),
            format!("threshold {} step {}: {} samples, mismatches {:?}", s.threshold, s.step, s.samples, s.mismatches),
        );
        r.result(&bc.to_string(), s);
    }
    Ok(r)
}

fn c05() -> Result<ExperimentReport> {
    let mut r = ExperimentReport::new("sloshing_identity");
    for m in [3, 5] {
        let mut sub = ExperimentReport::new("identity");
        identity_check(SloshingParams::new(m)?, 20)?.append_to(&mut sub);
        absorb(&mut r, &format!("m{m}"), &sub);
    }
    Ok(r)
}

fn sloshing_trace(m: u32, name: &str) -> Result<ExperimentReport> {
    let start = Instant::now();
    let params = SloshingParams::new(m)?;
    let window = TraceWindow::default();
    let coarse = trace_counterexample(params, window, 400)?;
    let fine = trace_counterexample(params, window, 800)?;
    let mut r = ExperimentReport::new(name);
    absorb(&mut r, &format!("m{m}"), &coarse.to_report(Some(&refinement_check(&coarse, &fine))));
    runtime(&mut r, start, 300.0);
    Ok(r)
}

fn c08(profile: Profile) -> Result<ExperimentReport> {
    let start = Instant::now();
    let mut r = ExperimentReport::new("disc_spectrum");
    let f = profile.finest_h();
    let hs = [4.0 * f, 2.0 * f, f];
    let (j01, j11) = (bessel_first_zero(BesselOrder::Zero), bessel_first_zero(BesselOrder::One));
    let disc = convergence_study(&DomainSpec::Disc { radius: 1.0 }, &[j01 * j01, j11 * j11], &hs)?;
    let e = disc.finest_errors();
    r.result("disc", &disc);
    r.check("disc_error", e.iter().all(|&e| e <= 0.02), format!("relative errors {e:?} at h = {f}"));
    profile.fine_grid_check(
        &mut r,
        "disc_order",
        disc.min_order() >= 1.0,
        format!("observed orders {:?} over h = {hs:?} (need ≥ 1)", disc.orders),
    );
    let square = convergence_study(&DomainSpec::Rect { a: PI, b: PI }, &[2.0, 5.0], &[PI / 16.0, PI / 32.0, PI / 64.0])?;
    r.check("square_order", square.min_order() >= 1.8, format!("observed orders {:?} (need ≥ 1.8)", square.orders));
    r.result("square", &square);
    runtime(&mut r, start, 180.0);
    Ok(r)
}

fn c09(profile: Profile) -> Result<ExperimentReport> {
    let mut r = ExperimentReport::new("annulus_cross_validation");
    let a = annulus_comparison(2.0, profile.finest_h())?;
    profile.fine_grid_check(
        &mut r,
        "annulus_r2",
        a.passed(),
        format!("FD λ₁ = {:.6} vs μ(2)² = {:.6}: {:.3}% at h = {}", a.lambda1, a.mu_squared, 100.0 * a.relative_difference, a.h),
    );
    r.result("annulus", a);
    Ok(r)
}

fn c10() -> Result<ExperimentReport> {
    let mut r = ExperimentReport::new("courant_counting");
    let square = solve_domain(&DomainSpec::Rect { a: PI, b: PI }, PI / 64.0, 10)?;
    let bad = courant_violations(&square)?;
    r.result("square_eigenvalues", square.eigenvalues());
    r.check("square_first_10", bad.is_empty(), format!("(index, count) above the bound: {bad:?}"));
    let mut counts = Vec::new();
    for n in 1..=6 {
        let mode = rectangular_canal_modes(1.0, 1.0, n)?;
        counts.push(nodal_domain_report(&mode.field(240)?, n, n + 1)?);
    }
    r.check(
        "canal_first_6",
        counts.iter().all(|c| c.within_bound),
        format!("domain counts {:?} against n + 1", counts.iter().map(|c| c.components).collect::<Vec<_>>()),
    );
    r.result("canal", counts);
    Ok(r)
}

fn c12(profile: Profile) -> Result<ExperimentReport> {
    let mut r = ExperimentReport::new("alessandrini");
    let h = profile.finest_h();
    for (name, spec) in [("disc", DomainSpec::Disc { radius: 1.0 }), ("rect", DomainSpec::Rect { a: PI, b: 2.0 })] {
        absorb(&mut r, name, &alessandrini_check(&spec, h, 16, SEED)?.to_report());
    }
    Ok(r)
}

fn c13() -> Result<ExperimentReport> {
    let study = payne_experiment(3, 0.2, 2.0, &[1.0 / 32.0, 1.0 / 64.0])?;
    let mut r = ExperimentReport::new("payne");
    absorb(&mut r, "payne", &study.to_report());
    Ok(r)
}

/// Run criterion `id` (1–13). Errors inside the criterion become a FAIL
/// verdict rather than aborting.
pub fn run_criterion(id: usize, profile: Profile) -> ExperimentReport {
    let start = Instant::now();
    let outcome = match id {
        1 => c01(),
        2 => c02(),
        3 => c03(profile),
        4 => c04(),
        5 => c05(),
        6 => sloshing_trace(3, "counterexample_m3"),
        7 => sloshing_trace(5, "node_counts_m5"),
        8 => c08(profile),
        9 => c09(profile),
        10 => c10(),
        11 => pleijel_square_scan(10).map(|s| s.to_report()),
        12 => c12(profile),
        13 => c13(),
        _ => Err(crate::Error::Usage(format!("no criterion {id}"))),
    };
    let mut r = outcome.unwrap_or_else(|e| {
        let mut r = ExperimentReport::new(CRITERIA.get(id.wrapping_sub(1)).map_or("unknown", |c| c.1));
        r.check("completed", false, e.to_string());
        r
    });
    r.config("criterion", id).config("profile", profile);
    r.wall_clock_seconds = start.elapsed().as_secs_f64();
    r
}

/// One-line summary of a criterion: `PASS`/`FAIL` and the failing checks.
pub fn criterion_line(id: usize, r: &ExperimentReport) -> String {
    let status = Status::from_bool(r.passed());
    let failed: Vec<String> = r.failures().map(|v| format!("{}: {}", v.invariant, v.detail)).collect();
    let detail = if failed.is_empty() { format!("{} checks", r.verdicts.len()) } else { failed.join("; ") };
    format!("[{status}] {id:>2} {} ({:.1}s) {detail}", r.experiment, r.wall_clock_seconds)
}

/// Run every criterion; with `out`, each report lands in its own
/// subdirectory. The aggregate has one verdict per criterion.
pub fn run_suite(profile: Profile, out: Option<&Path>) -> Result<ExperimentReport> {
    let mut agg = ExperimentReport::new("suite");
    agg.config("profile", profile).config("seed", SEED);
    let mut index = Vec::new();
    for (id, name) in CRITERIA {
        let r = run_criterion(id, profile);
        let line = criterion_line(id, &r);
        eprintln!("{line}");
        let dir = format!("{id:02}-{name}");
        if let Some(out) = out {
            let d = out.join(&dir);
            std::fs::create_dir_all(&d)?;
            r.write(&d.join("report.json"))?;
            agg.artifacts.push(format!("{dir}/report.json"));
        }
        index.push(json!({ "id": id, "name": name, "directory": dir, "passed": r.passed() }));
        agg.check(&format!("{id:02}-{name}"), r.passed(), line);
    }
    agg.result("criteria", index);
    Ok(agg)
}
