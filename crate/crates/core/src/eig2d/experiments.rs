use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::domain::{build_mask, DomainSpec};
use super::solver::{eigen_smallest, DiscreteOperator, Spectrum, RESIDUAL_TOLERANCE};
use crate::error::{Error, Result};
use crate::nodal::{
    classify_endpoints, classify_endpoints_lenient, count_sign_components, extract_zero_curves, BoundaryModel,
    Connectivity, EndpointClass, ScalarField2D,
};
use crate::report::ExperimentReport;
use crate::sloshing::observed_order;
use crate::specfun::{bessel_first_zero, cross_product_mu, BesselOrder};

/// Endpoint tolerance in grid steps for staircase boundaries.
pub const ENDPOINT_CELLS: f64 = 2.0;
/// Agreement required between the FD annulus λ₁ and μ(r)².
pub const ANNULUS_TOLERANCE: f64 = 0.02;
/// Allowed relative change of the λ₂ gap under one halving of `h`.
pub const GAP_CONSISTENCY: f64 = 0.25;

/// Discretize `spec` at spacing `h` and compute its `count` smallest pairs.
pub fn solve_domain(spec: &DomainSpec, h: f64, count: usize) -> Result<Spectrum> {
    let mask = build_mask(spec, h)?;
    let op = DiscreteOperator::new(&mask, spec.boundary_aligned(h))?;
    eigen_smallest(&op, count)
}

/// Nodal-domain count of each pair against its index.
pub fn courant_violations(spectrum: &Spectrum) -> Result<Vec<(usize, usize)>> {
    let mut bad = Vec::new();
    for p in &spectrum.pairs {
        let c = count_sign_components(&p.field, Connectivity::Four)?.components;
        if c > p.index {
            bad.push((p.index, c));
        }
    }
    Ok(bad)
}

/// Where μ(r) sits relative to the first zeros of J₀ and J₁.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InterlacingCheck {
    pub r: f64,
    pub mu: f64,
    pub j01: f64,
    pub j11: f64,
    pub holds: bool,
    pub fd: Option<AnnulusComparison>,
}

/// FD annulus λ₁ against μ(r)².
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnnulusComparison {
    pub h: f64,
    pub lambda1: f64,
    pub mu_squared: f64,
    pub relative_difference: f64,
}

impl AnnulusComparison {
    pub fn passed(&self) -> bool {
        self.relative_difference <= ANNULUS_TOLERANCE
    }
}

pub fn annulus_comparison(r: f64, h: f64) -> Result<AnnulusComparison> {
    let mu = cross_product_mu(r)?.mu;
    let spectrum = solve_domain(&DomainSpec::Annulus { outer: r }, h, 1)?;
    let lambda1 = spectrum.pairs[0].eigenvalue;
    let mu_squared = mu * mu;
    Ok(AnnulusComparison { h, lambda1, mu_squared, relative_difference: (lambda1 - mu_squared).abs() / mu_squared })
}

/// Test `j₀,₁ < μ(r) < j₁,₁`; with `fd_h`, also compare against the FD
/// annulus at that spacing.
pub fn interlacing_check(r: f64, fd_h: Option<f64>) -> Result<InterlacingCheck> {
    let mu = cross_product_mu(r)?.mu;
    let j01 = bessel_first_zero(BesselOrder::Zero);
    let j11 = bessel_first_zero(BesselOrder::One);
    let fd = fd_h.map(|h| annulus_comparison(r, h)).transpose()?;
    Ok(InterlacingCheck { r, mu, j01, j11, holds: j01 < mu && mu < j11, fd })
}

impl InterlacingCheck {
    pub fn to_report(&self) -> ExperimentReport {
        let mut rep = ExperimentReport::new("bessel");
        rep.config("r", self.r);
        rep.result("mu", self.mu).result("j01", self.j01).result("j11", self.j11);
        rep.check(
            "interlacing",
            self.holds,
            if self.holds {
                format!("j0,1 = {:.6} < μ({}) = {:.6} < j1,1 = {:.6}", self.j01, self.r, self.mu, self.j11)
            } else {
                format!("μ({}) = {:.6} lies outside (j0,1, j1,1) = ({:.6}, {:.6})", self.r, self.mu, self.j01, self.j11)
            },
        );
        if let Some(fd) = &self.fd {
            rep.config("h", fd.h);
            rep.result("annulus", fd);
            rep.check(
                "annulus_cross_validation",
                fd.passed(),
                format!("FD λ₁ = {:.6} vs μ² = {:.6} ({:.3}%)", fd.lambda1, fd.mu_squared, 100.0 * fd.relative_difference),
            );
        }
        rep
    }
}

/// Eigenvalue errors against reference values over a sequence of halved steps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub domain: String,
    pub hs: Vec<f64>,
    pub reference: Vec<f64>,
    /// `eigenvalues[k][i]`: eigenvalue `i + 1` at step `hs[k]`.
    pub eigenvalues: Vec<Vec<f64>>,
    /// Relative errors, indexed like `eigenvalues`.
    pub errors: Vec<Vec<f64>>,
    /// Smallest pairwise observed order per eigenvalue.
    pub orders: Vec<f64>,
}

pub fn convergence_study(spec: &DomainSpec, reference: &[f64], hs: &[f64]) -> Result<ConvergenceStudy> {
    let mut eigenvalues = Vec::new();
    for &h in hs {
        eigenvalues.push(solve_domain(spec, h, reference.len())?.eigenvalues());
    }
    let errors: Vec<Vec<f64>> = eigenvalues
        .iter()
        .map(|ev| ev.iter().zip(reference).map(|(l, r)| (l - r).abs() / r).collect())
        .collect();
    let orders = (0..reference.len()).map(|i| observed_order(&errors.iter().map(|e| e[i]).collect::<Vec<_>>())).collect();
    Ok(ConvergenceStudy { domain: spec.label(), hs: hs.to_vec(), reference: reference.to_vec(), eigenvalues, errors, orders })
}

impl ConvergenceStudy {
    pub fn finest_errors(&self) -> &[f64] {
        self.errors.last().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn min_order(&self) -> f64 {
        self.orders.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Nodal set of one eigenfunction against the domain boundary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodalSummary {
    pub components: usize,
    pub curves: usize,
    pub closed_curves: usize,
    pub open_curve_endpoints: Vec<(Option<EndpointClass>, Option<EndpointClass>)>,
    /// Smallest distance from any nodal vertex to the boundary.
    pub min_boundary_distance: f64,
    /// Some closed curve stays more than the endpoint tolerance away from
    /// the boundary.
    pub closed_interior_curve: bool,
}

pub fn nodal_summary(field: &ScalarField2D, boundary: &impl BoundaryModel) -> Result<NodalSummary> {
    let tol = ENDPOINT_CELLS * field.h;
    let components = count_sign_components(field, Connectivity::Four)?.components;
    let curves = extract_zero_curves(field);
    let distance = |c: &crate::nodal::NodalCurve| c.vertices.iter().map(|&p| boundary.nearest(p).1).fold(f64::INFINITY, f64::min);
    let closed: Vec<_> = curves.iter().filter(|c| c.closed).collect();
    Ok(NodalSummary {
        components,
        curves: curves.len(),
        closed_curves: closed.len(),
        open_curve_endpoints: curves
            .iter()
            .filter(|c| !c.closed)
            .map(|c| {
                let t = classify_endpoints_lenient(c, boundary, tol);
                (t.start, t.end)
            })
            .collect(),
        min_boundary_distance: curves.iter().map(distance).fold(f64::INFINITY, f64::min),
        closed_interior_curve: closed.iter().any(|c| distance(c) > tol),
    })
}

/// One discretization of the disc-plus-annulus domain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PayneRun {
    pub h: f64,
    pub unknowns: usize,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Distance from λ₂ to its nearest neighbour.
    pub lambda2_gap: f64,
    pub lambda2_simple: bool,
    pub nodal: NodalSummary,
}

/// λ₂ and the nodal set of u₂ on the punctured-annulus domain.
pub fn payne_run(n: usize, eps: f64, r: f64, h: f64) -> Result<(PayneRun, Spectrum)> {
    let spec = DomainSpec::PuncturedAnnulus { n, eps, outer: r };
    let mask = build_mask(&spec, h)?;
    let op = DiscreteOperator::new(&mask, false)?;
    let spectrum = eigen_smallest(&op, 3)?;
    let u2 = &spectrum.pairs[1];
    let run = PayneRun {
        h,
        unknowns: op.dim(),
        eigenvalues: spectrum.eigenvalues(),
        residuals: spectrum.pairs.iter().map(|p| p.residual).collect(),
        lambda2_gap: u2.gap_above.min(u2.gap_below.unwrap_or(f64::INFINITY)),
        lambda2_simple: u2.is_simple(),
        nodal: nodal_summary(&u2.field, &spec.boundary())?,
    };
    Ok((run, spectrum))
}

/// Payne experiment at each step of `hs` (successively finer).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PayneStudy {
    pub n: usize,
    pub eps: f64,
    pub r: f64,
    pub interlacing: InterlacingCheck,
    pub runs: Vec<PayneRun>,
}

pub fn payne_experiment(n: usize, eps: f64, r: f64, hs: &[f64]) -> Result<PayneStudy> {
    DomainSpec::PuncturedAnnulus { n, eps, outer: r }.validate()?;
    let interlacing = interlacing_check(r, None)?;
    if !interlacing.holds {
        return Err(Error::Precondition(format!(
            "μ({r}) = {:.6} is outside (j0,1, j1,1) = ({:.6}, {:.6})",
            interlacing.mu, interlacing.j01, interlacing.j11
        )));
    }
    if hs.is_empty() {
        return Err(Error::Precondition("at least one grid step is required".into()));
    }
    let runs = hs.iter().map(|&h| payne_run(n, eps, r, h).map(|(run, _)| run)).collect::<Result<Vec<_>>>()?;
    Ok(PayneStudy { n, eps, r, interlacing, runs })
}

impl PayneStudy {
    /// Relative change of the λ₂ gap between consecutive runs.
    pub fn gap_changes(&self) -> Vec<f64> {
        self.runs.windows(2).map(|w| (w[0].lambda2_gap - w[1].lambda2_gap).abs() / w[1].lambda2_gap).collect()
    }

    pub fn gap_consistent(&self) -> bool {
        self.runs.iter().all(|r| r.lambda2_simple) && self.gap_changes().iter().all(|&c| c <= GAP_CONSISTENCY)
    }

    pub fn to_report(&self) -> ExperimentReport {
        let mut rep = ExperimentReport::new("payne");
        rep.config("N", self.n)
            .config("eps", self.eps)
            .config("r", self.r)
            .config("h", self.runs.iter().map(|r| r.h).collect::<Vec<_>>());
        rep.result("interlacing", &self.interlacing).result("runs", &self.runs).result("gap_changes", self.gap_changes());
        rep.check(
            "interlacing_precondition",
            self.interlacing.holds,
            format!("μ({}) = {:.6}", self.r, self.interlacing.mu),
        );
        let worst = self.runs.iter().flat_map(|r| r.residuals.iter().copied()).fold(0.0, f64::max);
        rep.check("residuals", worst <= RESIDUAL_TOLERANCE, format!("max residual {worst:.3e}"));
        let courant = self.runs.iter().all(|r| !r.lambda2_simple || r.nodal.components <= 2);
        rep.check(
            "courant_u2",
            courant,
            format!("u₂ nodal domains per run: {:?}", self.runs.iter().map(|r| r.nodal.components).collect::<Vec<_>>()),
        );
        for run in &self.runs {
            let simplicity = if run.lambda2_simple { "simple" } else { "undetermined" };
            rep.observe(
                "lambda2_simplicity",
                format!("h = {:.6}: λ₂ = {:.6}, gap {:.4e}, {simplicity}", run.h, run.eigenvalues[1], run.lambda2_gap),
            );
            rep.observe(
                "nodal_topology",
                format!(
                    "h = {:.6}: {} curves ({} closed), closed curve clear of ∂D: {}, min distance to ∂D {:.4}",
                    run.h,
                    run.nodal.curves,
                    run.nodal.closed_curves,
                    run.nodal.closed_interior_curve,
                    run.nodal.min_boundary_distance
                ),
            );
        }
        if self.runs.len() > 1 {
            rep.check(
                "gap_refinement_consistent",
                self.gap_consistent(),
                format!(
                    "gaps {:?}, relative changes {:?} (limit {GAP_CONSISTENCY})",
                    self.runs.iter().map(|r| r.lambda2_gap).collect::<Vec<_>>(),
                    self.gap_changes()
                ),
            );
        }
        rep
    }
}

/// Nodal curve of one member of the λ₂ eigenspace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlessandriniSample {
    /// Coefficients in the cluster basis.
    pub coefficients: Vec<f64>,
    pub curves: usize,
    pub closed_curves: usize,
    pub boundary_points: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlessandriniCheck {
    pub domain: String,
    pub h: f64,
    pub lambda2: f64,
    pub cluster: (usize, usize),
    pub samples: Vec<AlessandriniSample>,
}

fn combine(fields: &[&ScalarField2D], coefficients: &[f64]) -> Result<ScalarField2D> {
    let mut acc = fields[0].map(|v| v * coefficients[0]);
    for (f, &c) in fields.iter().zip(coefficients).skip(1) {
        acc = acc.combine(1.0, f, c)?;
    }
    Ok(acc)
}

/// Sample coefficient vectors for a `dim`-dimensional eigenspace: the basis
/// itself followed by `rotations` random unit vectors.
pub(crate) fn eigenspace_samples(dim: usize, rotations: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = (0..dim).map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    if dim > 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..rotations {
            let mut c: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
            c.iter_mut().for_each(|v| *v /= norm);
            out.push(c);
        }
    }
    out
}

/// Check that every sampled second eigenfunction of a convex domain has a
/// single open nodal curve with both ends on the boundary.
pub fn alessandrini_check(spec: &DomainSpec, h: f64, rotations: usize, seed: u64) -> Result<AlessandriniCheck> {
    if !spec.is_convex() {
        return Err(Error::Precondition(format!("{} is not a convex domain (disc or rect)", spec.label())));
    }
    let spectrum = solve_domain(spec, h, 3)?;
    let cluster = spectrum.cluster_of(2);
    let fields: Vec<&ScalarField2D> = cluster.iter().map(|p| &p.field).collect();
    let boundary = spec.boundary();
    let tol = ENDPOINT_CELLS * h;
    let samples = eigenspace_samples(fields.len(), rotations, seed)
        .into_iter()
        .map(|coefficients| {
            let u = combine(&fields, &coefficients)?;
            let curves = extract_zero_curves(&u);
            let closed_curves = curves.iter().filter(|c| c.closed).count();
            let boundary_points = curves
                .iter()
                .filter(|c| !c.closed)
                .map(|c| match classify_endpoints(c, &boundary, tol) {
                    Ok(_) => 2,
                    Err(_) => {
                        let t = classify_endpoints_lenient(c, &boundary, tol);
                        [t.start, t.end].iter().filter(|e| **e != Some(EndpointClass::DomainInteriorViolation)).count()
                    }
                })
                .sum();
            let passed = curves.len() == 1 && closed_curves == 0 && boundary_points == 2;
            Ok(AlessandriniSample { coefficients, curves: curves.len(), closed_curves, boundary_points, passed })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AlessandriniCheck {
        domain: spec.label(),
        h,
        lambda2: spectrum.pairs[1].eigenvalue,
        cluster: spectrum.pairs[1].cluster,
        samples,
    })
}

impl AlessandriniCheck {
    pub fn passed(&self) -> bool {
        self.samples.iter().all(|s| s.passed)
    }

    pub fn to_report(&self) -> ExperimentReport {
        let mut rep = ExperimentReport::new("alessandrini");
        rep.config("domain", &self.domain).config("h", self.h);
        rep.result("lambda2", self.lambda2).result("cluster", self.cluster).result("samples", &self.samples);
        let bad = self.samples.iter().filter(|s| !s.passed).count();
        rep.check(
            "two_boundary_points",
            self.passed(),
            format!(
                "{} of {} eigenspace samples have one open nodal curve meeting ∂D twice (cluster {:?})",
                self.samples.len() - bad,
                self.samples.len(),
                self.cluster
            ),
        );
        rep
    }
}
