use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_nodal-lab"));
    c.env_remove("NODAL_LAB_OUT");
    c
}

fn run(out: &Path, args: &[&str]) -> Output {
    bin().arg("--out").arg(out).args(args).output().expect("binary runs")
}

fn schema() -> jsonschema::JSONSchema {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/schema/report.schema.json")).unwrap();
    let schema: Value = serde_json::from_str(&text).unwrap();
    jsonschema::JSONSchema::compile(&schema).expect("schema compiles")
}

fn report(dir: &Path) -> Value {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    let s = schema();
    if let Err(errors) = s.validate(&v) {
        let msgs: Vec<String> = errors.map(|e| e.to_string()).collect();
        panic!("report in {} violates the schema: {msgs:?}", dir.display());
    }
    v
}

fn status<'a>(r: &'a Value, invariant: &str) -> &'a str {
    r["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .find(|v| v["invariant"] == invariant)
        .unwrap_or_else(|| panic!("no verdict {invariant}"))["status"]
        .as_str()
        .unwrap()
}

fn tmp() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

#[test]
fn bessel_pass_and_fail_exit_codes() {
    let d = tmp();
    let o = run(d.path(), &["bessel", "--r", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&d.path().join("bessel"));
    assert!((r["results"]["mu"].as_f64().unwrap() - 3.123).abs() < 1e-3);
    assert_eq!(status(&r, "interlacing"), "PASS");

    let o = run(d.path(), &["bessel", "--r", "5/3"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(status(&report(&d.path().join("bessel")), "interlacing"), "FAIL");
}

#[test]
fn usage_errors_exit_two() {
    let d = tmp();
    let o = run(d.path(), &["bessel", "--r", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("exceed 1"));
    assert_eq!(run(d.path(), &["sloshing", "--m", "4"]).status.code(), Some(2));
    assert_eq!(run(d.path(), &["bessel", "--radius", "2"]).status.code(), Some(2));
    assert_eq!(run(d.path(), &["pleijel", "--k-max", "21"]).status.code(), Some(2));
    assert_eq!(run(d.path(), &["payne", "--eps", "0.01", "--h", "1/32"]).status.code(), Some(2));
}

#[test]
fn herrmann_scan_report() {
    let d = tmp();
    let o = run(d.path(), &["herrmann", "--bc", "dirichlet", "--n", "4", "--trials", "2000", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let dir = d.path().join("herrmann");
    let r = report(&dir);
    assert_eq!(r["results"]["max_nodes"], 3);
    assert_eq!(status(&r, "herrmann_bound_1d"), "PASS");
    let csv = std::fs::read_to_string(dir.join("histogram.csv")).unwrap();
    assert!(csv.starts_with("nodes,trials\n"));
}

#[test]
fn string_and_sl_reports() {
    let d = tmp();
    assert_eq!(run(d.path(), &["string", "--bc", "dirichlet", "--n", "3", "--coeffs", "1,-1,0.5"]).status.code(), Some(0));
    let r = report(&d.path().join("string"));
    assert_eq!(status(&r, "threshold_sharpness"), "PASS");

    assert_eq!(run(d.path(), &["sl", "--q", "1+x^2", "--count", "4", "--samples", "801"]).status.code(), Some(0));
    let dir = d.path().join("sl");
    let r = report(&dir);
    assert_eq!(status(&r, "sturm_oscillation"), "PASS");
    let csv = std::fs::read_to_string(dir.join("eigenvectors.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,u1,u2,u3,u4"));
    // 17 significant digits
    let first = lines.next().unwrap().split(',').next().unwrap();
    assert_eq!(first.split('e').next().unwrap().replace(['.', '-'], "").len(), 17);
}

#[test]
fn sloshing_m3_artifacts() {
    let d = tmp();
    let o = run(d.path(), &["sloshing", "--m", "3", "--nx", "200"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let dir = d.path().join("sloshing");
    let r = report(&dir);
    assert_eq!(status(&r, "kuttler_counterexample"), "PASS");
    for f in ["u.csv", "v.csv", "curves.json", "contours.svg"] {
        assert!(dir.join(f).exists(), "{f}");
        assert!(r["artifacts"].as_array().unwrap().iter().any(|a| a == f));
    }
    let svg = std::fs::read_to_string(dir.join("contours.svg")).unwrap();
    assert!(svg.contains("stroke-dasharray") && svg.contains(">x</text>"));

    // byte-stable plot and identical numbers on a rerun
    let again = tmp();
    run(again.path(), &["sloshing", "--m", "3", "--nx", "200"]);
    let svg2 = std::fs::read_to_string(again.path().join("sloshing/contours.svg")).unwrap();
    assert_eq!(svg, svg2);
    let mut r2 = report(&again.path().join("sloshing"));
    let mut r1 = r;
    r1["wall_clock_seconds"] = Value::Null;
    r2["wall_clock_seconds"] = Value::Null;
    assert_eq!(r1, r2);
}

#[test]
fn sloshing_m5_counts() {
    let d = tmp();
    assert_eq!(run(d.path(), &["sloshing", "--m", "5", "--nx", "400"]).status.code(), Some(0));
    let r = report(&d.path().join("sloshing"));
    assert_eq!(status(&r, "node_counts"), "PASS");
    // mirror-joined node counts: v-nodes cross the axis, u-nodes come in pairs
    assert_eq!(r["results"]["v_nodes"]["full_plane"], 2);
    assert_eq!(r["results"]["u_nodes"]["full_plane"], 4);
    assert_eq!(status(&r, "finite_u_nodes_inside_w"), "PASS");
}

#[test]
fn payne_outputs() {
    let d = tmp();
    let o = run(d.path(), &["payne", "--N", "3", "--eps", "0.2", "--r", "2", "--h", "1/32"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let dir = d.path().join("payne");
    let r = report(&dir);
    assert_eq!(status(&r, "interlacing_precondition"), "PASS");
    assert!(status(&r, "nodal_topology") == "OBSERVED");
    let pgm = std::fs::read_to_string(dir.join("mask.pgm")).unwrap();
    assert!(pgm.starts_with("P2\n"));
    assert!(dir.join("u2.csv").exists() && dir.join("nodal.svg").exists());

    // interlacing fails for r = 5/3: precondition named, usage exit
    let o = run(d.path(), &["payne", "--r", "5/3", "--h", "1/32"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn pleijel_and_alessandrini() {
    let d = tmp();
    assert_eq!(run(d.path(), &["pleijel", "--k-max", "6"]).status.code(), Some(0));
    let r = report(&d.path().join("pleijel"));
    assert_eq!(status(&r, "courant_sharp_indices"), "PASS");
    assert_eq!(run(d.path(), &["alessandrini", "--domain", "rect", "--h", "1/32"]).status.code(), Some(0));
    let r = report(&d.path().join("alessandrini"));
    assert_eq!(status(&r, "two_boundary_points"), "PASS");
}

#[test]
fn config_file_and_output_root() {
    let d = tmp();
    let cfg = d.path().join("run.cfg");
    std::fs::write(&cfg, "# herrmann defaults\nbc = periodic\nn = 5\ntrials = 300\n").unwrap();
    let env_root: PathBuf = d.path().join("from-env");
    let o = bin()
        .env("NODAL_LAB_OUT", &env_root)
        .args(["--config", cfg.to_str().unwrap(), "herrmann", "--n", "3"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let r = report(&env_root.join("herrmann"));
    assert_eq!(r["config"]["n"], 3);
    assert_eq!(r["config"]["trials"], 300);
    assert_eq!(r["config"]["bc"], "periodic");

    // --out beats the environment
    let flag_root = d.path().join("from-flag");
    let o = bin()
        .env("NODAL_LAB_OUT", &env_root)
        .args(["bessel", "--out", flag_root.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(flag_root.join("bessel/report.json").exists());
    assert!(!env_root.join("bessel").exists());
}

#[test]
fn help_lists_subcommands() {
    let o = bin().arg("--help").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    for s in ["bessel", "herrmann", "string", "sl", "sloshing", "payne", "pleijel", "alessandrini", "suite"] {
        assert!(text.contains(s), "{s}");
    }
}

#[test]
fn quick_suite_aggregate() {
    let d = tmp();
    let o = run(d.path(), &["suite", "--profile", "quick"]);
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert_eq!(o.status.code(), Some(0), "{stderr}");
    let dir = d.path().join("suite");
    let r = report(&dir);
    assert_eq!(r["verdicts"].as_array().unwrap().len(), 13);
    for k in 1..=13 {
        let sub = std::fs::read_dir(&dir).unwrap().filter_map(|e| e.ok()).find(|e| {
            e.file_name().to_string_lossy().starts_with(&format!("{k:02}-"))
        });
        report(&sub.expect("criterion directory").path());
    }
}
