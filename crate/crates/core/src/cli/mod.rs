//! Command-line experiment runner: one subcommand per construction, each
//! writing `report.json` plus CSV/SVG/PGM artifacts.

pub mod suite;
pub mod svg;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{ArgAction, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};

use crate::eig2d::{
    alessandrini_check, build_mask, interlacing_check, payne_experiment, payne_run, pleijel_square_scan, DomainSpec,
};
use crate::error::{Error, Result};
use crate::report::ExperimentReport;
use crate::sloshing::{
    identity_check, refinement_check, sample_fields, trace_counterexample, trace_sampled, SloshingParams, TraceWindow,
};
use crate::string1d::{herrmann_scan, sl_report, solve_sl, string_report, BoundaryCondition, SlProblem};
use svg::{render_contours, CurveSet, LineStyle, PlotWindow};

pub use suite::Profile;

/// Environment variable overriding the default output root.
pub const OUT_ENV: &str = "NODAL_LAB_OUT";
const DEFAULT_OUT: &str = "nodal-lab-out";

/// Parse a real number, also accepting `a/b` fractions and `pi`.
pub fn parse_real(s: &str) -> std::result::Result<f64, String> {
    let atom = |t: &str| -> std::result::Result<f64, String> {
        let t = t.trim();
        match t.to_ascii_lowercase().as_str() {
            "pi" | "π" => Ok(std::f64::consts::PI),
            _ => t.parse::<f64>().map_err(|e| format!("'{t}' is not a number: {e}")),
        }
    };
    let v = match s.split_once('/') {
        Some((a, b)) => atom(a)? / atom(b)?,
        None => atom(s)?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

#[derive(Debug, Parser)]
#[command(name = "nodal-lab", version, about = "Nodal-set experiments for string, membrane and sloshing eigenproblems")]
pub struct Cli {
    /// Output root (default: $NODAL_LAB_OUT, else ./nodal-lab-out).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// key=value file supplying defaults; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bessel zeros and the annulus cross-product root μ(r).
    Bessel(BesselArgs),
    /// Random combinations of the first n string eigenfunctions.
    Herrmann(HerrmannArgs),
    /// String eigenpairs, expansions, node thresholds.
    String(StringArgs),
    /// Sturm–Liouville spectrum with Dirichlet ends.
    Sl(SlArgs),
    /// Nodal curves of the sloshing potential and stream function.
    Sloshing(SloshingArgs),
    /// Second eigenfunction on the disc joined to an annulus through holes.
    Payne(PayneArgs),
    /// Nodal-domain counts of square-membrane eigenfunctions.
    Pleijel(PleijelArgs),
    /// Nodal curve of u₂ on a convex domain.
    Alessandrini(AlessandriniArgs),
    /// The full verification battery.
    Suite(SuiteArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Bessel(_) => "bessel",
            Command::Herrmann(_) => "herrmann",
            Command::String(_) => "string",
            Command::Sl(_) => "sl",
            Command::Sloshing(_) => "sloshing",
            Command::Payne(_) => "payne",
            Command::Pleijel(_) => "pleijel",
            Command::Alessandrini(_) => "alessandrini",
            Command::Suite(_) => "suite",
        }
    }
}

#[derive(Debug, Args)]
pub struct BesselArgs {
    /// Outer radius of the annulus (inner radius 1).
    #[arg(long, default_value = "2", value_parser = parse_real)]
    pub r: f64,
    /// Also compare μ(r)² with the FD annulus λ₁ at this grid step.
    #[arg(long, value_parser = parse_real)]
    pub h: Option<f64>,
}

#[derive(Debug, Args)]
pub struct HerrmannArgs {
    #[arg(long, default_value = "dirichlet")]
    pub bc: BoundaryCondition,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct StringArgs {
    #[arg(long, default_value = "dirichlet")]
    pub bc: BoundaryCondition,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Combination coefficients, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub coeffs: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct SlArgs {
    #[arg(long, default_value = "pi", value_parser = parse_real)]
    pub length: f64,
    #[arg(long, default_value_t = 2001)]
    pub samples: usize,
    /// Potential: a constant, or `1+x^2`.
    #[arg(long, default_value = "0")]
    pub q: String,
    #[arg(long, default_value_t = 3)]
    pub count: usize,
}

#[derive(Debug, Args)]
pub struct SloshingArgs {
    /// Odd integer with λ = m/2.
    #[arg(long, default_value_t = 3)]
    pub m: u32,
    /// Grid columns across the right half-window.
    #[arg(long, default_value_t = 400)]
    pub nx: usize,
    #[arg(long, value_parser = parse_real)]
    pub x_max: Option<f64>,
    #[arg(long, value_parser = parse_real)]
    pub depth: Option<f64>,
    /// Repeat at twice the resolution and compare topology.
    #[arg(long, action = ArgAction::SetTrue)]
    pub refine: bool,
}

#[derive(Debug, Args)]
pub struct PayneArgs {
    /// Number of holes.
    #[arg(long = "N", default_value_t = 3)]
    pub holes: usize,
    /// Angular half-width of each hole.
    #[arg(long, default_value = "0.2", value_parser = parse_real)]
    pub eps: f64,
    #[arg(long, default_value = "2", value_parser = parse_real)]
    pub r: f64,
    #[arg(long, default_value = "1/64", value_parser = parse_real)]
    pub h: f64,
    /// Also run at 2h and compare the λ₂ gap.
    #[arg(long, action = ArgAction::SetTrue)]
    pub refine: bool,
}

#[derive(Debug, Args)]
pub struct PleijelArgs {
    #[arg(long, default_value_t = 10)]
    pub k_max: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConvexDomain {
    Disc,
    Rect,
}

#[derive(Debug, Args)]
pub struct AlessandriniArgs {
    #[arg(long, value_enum, default_value = "disc")]
    pub domain: ConvexDomain,
    #[arg(long, default_value = "1", value_parser = parse_real)]
    pub radius: f64,
    #[arg(long, default_value = "pi", value_parser = parse_real)]
    pub a: f64,
    #[arg(long, default_value = "2", value_parser = parse_real)]
    pub b: f64,
    #[arg(long, default_value = "1/64", value_parser = parse_real)]
    pub h: f64,
    /// Random rotations within a degenerate eigenspace.
    #[arg(long, default_value_t = 16)]
    pub rotations: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    #[arg(long, value_enum, default_value = "quick")]
    pub profile: Profile,
}

fn read_config(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)?;
    let mut pairs = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("{}:{}: expected key=value", path.display(), n + 1)))?;
        pairs.push((k.trim().trim_start_matches("--").to_string(), v.trim().to_string()));
    }
    Ok(pairs)
}

fn config_path(args: &[OsString]) -> Option<PathBuf> {
    args.iter().enumerate().find_map(|(i, a)| {
        let s = a.to_str()?;
        if s == "--config" {
            args.get(i + 1).map(PathBuf::from)
        } else {
            s.strip_prefix("--config=").map(PathBuf::from)
        }
    })
}

/// Insert config-file entries as flags right after the subcommand name, so
/// flags given on the command line (later occurrences) win.
fn merge_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let pairs = read_config(&path)?;
    let cmd = Cli::command();
    let Some(pos) = args.iter().position(|a| a.to_str().is_some_and(|s| cmd.find_subcommand(s).is_some())) else {
        return Ok(args);
    };
    let sub = cmd.find_subcommand(args[pos].to_str().expect("matched above")).expect("matched above");
    let mut injected = Vec::new();
    for (key, value) in pairs {
        if key == "config" {
            continue;
        }
        let arg = sub
            .get_arguments()
            .chain(cmd.get_arguments())
            .find(|a| a.get_long() == Some(key.as_str()))
            .ok_or_else(|| Error::Usage(format!("config key '{key}' is not a flag of '{}'", sub.get_name())))?;
        if matches!(arg.get_action(), ArgAction::SetTrue) {
            if matches!(value.to_ascii_lowercase().as_str(), "true" | "1" | "yes") {
                injected.push(OsString::from(format!("--{key}")));
            }
        } else {
            injected.push(OsString::from(format!("--{key}")));
            injected.push(OsString::from(value));
        }
    }
    let mut out = args[..=pos].to_vec();
    out.extend(injected);
    out.extend_from_slice(&args[pos + 1..]);
    Ok(out)
}

/// Parse arguments (including any `--config` file).
pub fn parse(args: impl IntoIterator<Item = impl Into<OsString>>) -> std::result::Result<Cli, CliError> {
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = merge_config(args).map_err(CliError::Run)?;
    let cmd = Cli::command().args_override_self(true).mut_subcommands(|s| s.args_override_self(true));
    let matches = cmd.try_get_matches_from(args).map_err(CliError::Clap)?;
    Cli::from_arg_matches(&matches).map_err(CliError::Clap)
}

#[derive(Debug)]
pub enum CliError {
    Clap(clap::Error),
    Run(Error),
}

impl Cli {
    /// Output directory for this invocation.
    pub fn output_dir(&self) -> PathBuf {
        let root = self
            .out
            .clone()
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
        root.join(self.command.name())
    }
}

fn precondition(e: Error) -> Error {
    match e {
        Error::Domain(m) | Error::Precondition(m) | Error::Resolution(m) => Error::Usage(m),
        other => other,
    }
}

/// Run the selected experiment and write its artifacts.
pub fn run(cli: &Cli) -> Result<ExperimentReport> {
    let dir = cli.output_dir();
    std::fs::create_dir_all(&dir)?;
    let start = Instant::now();
    let mut report = match &cli.command {
        Command::Bessel(a) => run_bessel(a),
        Command::Herrmann(a) => run_herrmann(a, &dir),
        Command::String(a) => string_report(a.bc, a.n, a.coeffs.clone()).map_err(precondition),
        Command::Sl(a) => run_sl(a, &dir),
        Command::Sloshing(a) => run_sloshing(a, &dir),
        Command::Payne(a) => run_payne(a, &dir),
        Command::Pleijel(a) => run_pleijel(a, &dir),
        Command::Alessandrini(a) => run_alessandrini(a, &dir),
        Command::Suite(a) => suite::run_suite(a.profile, Some(&dir)),
    }?;
    report.wall_clock_seconds = start.elapsed().as_secs_f64();
    report.artifacts.push("report.json".into());
    report.write(&dir.join("report.json"))?;
    Ok(report)
}

fn run_bessel(a: &BesselArgs) -> Result<ExperimentReport> {
    Ok(interlacing_check(a.r, a.h).map_err(precondition)?.to_report())
}

fn run_herrmann(a: &HerrmannArgs, dir: &Path) -> Result<ExperimentReport> {
    let scan = herrmann_scan(a.bc, a.n, a.trials, a.seed).map_err(precondition)?;
    let mut csv = String::from("nodes,trials\n");
    for (k, c) in scan.histogram.iter().enumerate() {
        let _ = writeln!(csv, "{k},{c}");
    }
    std::fs::write(dir.join("histogram.csv"), csv)?;
    let mut r = scan.to_report();
    r.artifacts.push("histogram.csv".into());
    Ok(r)
}

fn potential(spec: &str) -> Result<Box<dyn Fn(f64) -> f64>> {
    let compact: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
    if compact == "1+x^2" {
        return Ok(Box::new(|x| 1.0 + x * x));
    }
    let c = parse_real(&compact).map_err(Error::Usage)?;
    Ok(Box::new(move |_| c))
}

fn run_sl(a: &SlArgs, dir: &Path) -> Result<ExperimentReport> {
    let problem = SlProblem::from_fn(a.length, a.samples, potential(&a.q)?).map_err(precondition)?;
    let mut r = sl_report(&problem, a.count, &a.q).map_err(precondition)?;
    let pairs = solve_sl(&problem, a.count)?;
    let mut csv = String::from("x");
    for p in &pairs {
        let _ = write!(csv, ",u{}", p.index);
    }
    csv.push('\n');
    for (i, x) in pairs[0].x.iter().enumerate() {
        let _ = write!(csv, "{x:.16e}");
        for p in &pairs {
            let _ = write!(csv, ",{:.16e}", p.vector[i]);
        }
        csv.push('\n');
    }
    std::fs::write(dir.join("eigenvectors.csv"), csv)?;
    r.artifacts.push("eigenvectors.csv".into());
    Ok(r)
}

fn write_field(dir: &Path, name: &str, field: &crate::nodal::ScalarField2D, column: &str) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(dir.join(name))?);
    field.write_csv(&mut f, column)?;
    Ok(())
}

fn run_sloshing(a: &SloshingArgs, dir: &Path) -> Result<ExperimentReport> {
    let params = SloshingParams::new(a.m).map_err(precondition)?;
    let default = TraceWindow::default();
    let window = TraceWindow { x_max: a.x_max.unwrap_or(default.x_max), depth: a.depth.unwrap_or(default.depth) };
    let (u, v) = sample_fields(params, window, a.nx).map_err(precondition)?;
    let trace = trace_sampled(params, window, &u, &v)?;
    let refinement = if a.refine {
        Some(refinement_check(&trace, &trace_counterexample(params, window, 2 * a.nx)?))
    } else {
        None
    };
    let mut r = trace.to_report(refinement.as_ref());
    identity_check(params, 20)?.append_to(&mut r);
    write_field(dir, "u.csv", &u, "u")?;
    write_field(dir, "v.csv", &v, "v")?;
    let curves = serde_json::json!({ "u": trace.u_curves, "v": trace.v_curves });
    std::fs::write(dir.join("curves.json"), serde_json::to_string_pretty(&curves)? + "\n")?;
    let plot = PlotWindow { x_min: 0.0, x_max: window.x_max, y_min: -window.depth, y_max: 0.0 };
    let svg = render_contours(
        plot,
        &[
            CurveSet { label: "u", curves: &trace.u_curves, style: LineStyle::Solid },
            CurveSet { label: "v", curves: &trace.v_curves, style: LineStyle::Dashed },
        ],
    );
    std::fs::write(dir.join("contours.svg"), svg)?;
    r.artifacts.extend(["u.csv", "v.csv", "curves.json", "contours.svg"].map(String::from));
    Ok(r)
}

fn run_payne(a: &PayneArgs, dir: &Path) -> Result<ExperimentReport> {
    let hs = if a.refine { vec![2.0 * a.h, a.h] } else { vec![a.h] };
    let study = payne_experiment(a.holes, a.eps, a.r, &hs).map_err(precondition)?;
    let mut r = study.to_report();
    let spec = DomainSpec::PuncturedAnnulus { n: a.holes, eps: a.eps, outer: a.r };
    std::fs::write(dir.join("mask.pgm"), build_mask(&spec, a.h)?.mask_pgm())?;
    let (_, spectrum) = payne_run(a.holes, a.eps, a.r, a.h)?;
    let u2 = &spectrum.pairs[1].field;
    write_field(dir, "u2.csv", u2, "u2")?;
    let curves = crate::nodal::extract_zero_curves(u2);
    let plot = PlotWindow { x_min: -a.r, x_max: a.r, y_min: -a.r, y_max: a.r };
    std::fs::write(
        dir.join("nodal.svg"),
        render_contours(plot, &[CurveSet { label: "u2", curves: &curves, style: LineStyle::Solid }]),
    )?;
    r.artifacts.extend(["mask.pgm", "u2.csv", "nodal.svg"].map(String::from));
    Ok(r)
}

fn run_pleijel(a: &PleijelArgs, dir: &Path) -> Result<ExperimentReport> {
    let scan = pleijel_square_scan(a.k_max).map_err(precondition)?;
    let mut csv = String::from("k,eigenvalue,multiplicity,family_size,max_count\n");
    for row in &scan.rows {
        let _ = writeln!(csv, "{},{},{},{},{}", row.k, row.eigenvalue, row.multiplicity, row.family_size, row.max_count);
    }
    std::fs::write(dir.join("counts.csv"), csv)?;
    let mut r = scan.to_report();
    r.artifacts.push("counts.csv".into());
    Ok(r)
}

fn run_alessandrini(a: &AlessandriniArgs, dir: &Path) -> Result<ExperimentReport> {
    let spec = match a.domain {
        ConvexDomain::Disc => DomainSpec::Disc { radius: a.radius },
        ConvexDomain::Rect => DomainSpec::Rect { a: a.a, b: a.b },
    };
    let check = alessandrini_check(&spec, a.h, a.rotations, a.seed).map_err(precondition)?;
    let mut r = check.to_report();
    r.config("rotations", a.rotations).config("seed", a.seed);
    std::fs::write(dir.join("mask.pgm"), build_mask(&spec, a.h)?.mask_pgm())?;
    r.artifacts.push("mask.pgm".into());
    Ok(r)
}

/// Print a one-line summary per verdict.
pub fn summary(report: &ExperimentReport) -> String {
    let mut s = String::new();
    for v in &report.verdicts {
        let _ = writeln!(s, "{:<8} {}: {}", v.status.to_string(), v.invariant, v.detail);
    }
    let _ = writeln!(s, "{} in {:.2}s", report.experiment, report.wall_clock_seconds);
    s
}

/// Entry point shared by the binary: returns the process exit code
/// (0 when no verdict failed, 1 on a FAIL verdict or runtime error, 2 on
/// usage errors).
pub fn main_with_args(args: impl IntoIterator<Item = impl Into<OsString>>) -> i32 {
    let cli = match parse(args) {
        Ok(c) => c,
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
        Err(CliError::Run(e)) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match run(&cli) {
        Ok(report) => {
            print!("{}", summary(&report));
            if report.passed() {
                0
            } else {
                1
            }
        }
        Err(e @ Error::Usage(_)) => {
            eprintln!("error: {e}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_and_fractions() {
        assert_eq!(parse_real("1/64").unwrap(), 1.0 / 64.0);
        assert_eq!(parse_real("5/3").unwrap(), 5.0 / 3.0);
        assert_eq!(parse_real("pi").unwrap(), std::f64::consts::PI);
        assert!(parse_real("x").is_err());
        assert!(parse_real("1/0").is_err());
    }

    #[test]
    fn flags_override_config() {
        let dir = std::env::temp_dir().join(format!("nodal-lab-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let cfg = dir.join("run.cfg");
        std::fs::write(&cfg, "# defaults\nn = 6\ntrials=50\nbc = neumann\n").unwrap();
        let cli = parse(["nodal-lab", "--config", cfg.to_str().unwrap(), "herrmann", "--n", "3"]).unwrap();
        match cli.command {
            Command::Herrmann(a) => {
                assert_eq!((a.n, a.trials, a.bc), (3, 50, BoundaryCondition::Neumann));
            }
            other => panic!("{other:?}"),
        }
        std::fs::write(&cfg, "bogus = 1\n").unwrap();
        assert!(matches!(parse(["nodal-lab", "--config", cfg.to_str().unwrap(), "herrmann"]), Err(CliError::Run(_))));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn boolean_config_entries() {
        let dir = std::env::temp_dir().join(format!("nodal-lab-cfgb-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let cfg = dir.join("run.cfg");
        std::fs::write(&cfg, "refine = true\nh = 1/32\n").unwrap();
        let cli = parse(["nodal-lab", "payne", "--config", cfg.to_str().unwrap()]).unwrap();
        match cli.command {
            Command::Payne(a) => assert!(a.refine && a.h == 1.0 / 32.0),
            other => panic!("{other:?}"),
        }
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn symbol_flags() {
        let cli = parse(["nodal-lab", "payne", "--N", "4", "--eps", "0.1", "--r", "2", "--h", "1/64"]).unwrap();
        assert!(matches!(cli.command, Command::Payne(PayneArgs { holes: 4, .. })));
        assert!(parse(["nodal-lab", "sloshing", "--m", "3"]).is_ok());
        assert!(matches!(parse(["nodal-lab", "bessel", "--bogus"]), Err(CliError::Clap(_))));
    }
}
