use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use serde_json::Value;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn zcorr(args: &[&str]) -> Output {
    zcorr_env(args, &[])
}

fn zcorr_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_zcorr"));
    cmd.args(args).env_remove("ZCORR_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn value(o: &Output) -> f64 {
    assert_eq!(o.status.code(), Some(0), "{}", stderr(o));
    stdout(o).trim().parse().unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn curve_rows(csv: &str) -> Vec<(f64, f64)> {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("r,kappa"));
    lines
        .map(|l| {
            let (r, k) = l.split_once(',').unwrap();
            (r.parse().unwrap(), k.parse().unwrap())
        })
        .collect()
}

#[test]
fn eval_closed_matches_library() {
    let v = value(&zcorr(&["eval", "--m", "3", "--k", "3", "--r", "1.0", "--method", "closed"]));
    let lib = zcorr::correlators::kappa_point_closed(1.0, 3).unwrap();
    assert!(rel(v, lib) <= 1e-14);
}

#[test]
fn every_method_agrees() {
    let closed = value(&zcorr(&["eval", "--m", "2", "--k", "2", "--r", "0.8"]));
    for method in ["berezin", "expansion", "wick"] {
        let v = value(&zcorr(&["eval", "--m", "2", "--k", "2", "--r", "0.8", "--method", method]));
        assert!(rel(v, closed) <= 1e-12, "{method}");
    }
    let mc = value(&zcorr(&[
        "eval", "--m", "2", "--k", "2", "--r", "0.8", "--method", "mc", "--samples", "200000", "--seed", "0x2a",
    ]));
    assert!(rel(mc, closed) <= 0.05);
}

#[test]
fn far_pair_is_uncorrelated() {
    let v = value(&zcorr(&["eval", "--m", "2", "--k", "2", "--r", "10", "--method", "berezin"]));
    assert!((v - 1.0).abs() <= 1e-10);
}

#[test]
fn negative_distance_is_a_domain_error() {
    let o = zcorr(&["eval", "--m", "1", "--k", "1", "--r", "-1", "--method", "closed"]);
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert!(msg.contains("r > 0"), "{msg}");
    assert_eq!(msg.lines().filter(|l| !l.starts_with('#')).count(), 1);
}

#[test]
fn inconsistent_flags_rejected() {
    for args in [
        vec!["eval", "--m", "1", "--k", "2", "--r", "1"],
        vec!["eval", "--m", "5", "--k", "4", "--r", "1", "--method", "closed"],
        vec!["eval", "--m", "3", "--k", "2", "--r", "1", "--method", "wick"],
        vec!["series", "--m", "6", "--k", "4"],
    ] {
        assert_eq!(zcorr(&args).status.code(), Some(2), "{args:?}");
    }
    assert_eq!(zcorr(&["eval", "--m", "1", "--k", "1", "--r", "1", "--frobnicate"]).status.code(), Some(2));
    assert_eq!(zcorr(&["eval", "--m", "1", "--k", "1"]).status.code(), Some(2));
}

#[test]
fn resolved_configuration_printed_first() {
    let o = zcorr(&["eval", "--m", "2", "--k", "1", "--r", "0.5"]);
    let first = stderr(&o).lines().next().unwrap().to_string();
    assert!(first.starts_with("# zcorr eval"), "{first}");
    assert!(first.contains("k=1") && first.contains("m=2") && first.contains("method=closed"));
}

#[test]
fn points_file_evaluation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pts.json");
    std::fs::write(&path, "[[[0,0],[0,0]], [[0.7,0.1],[0.2,-0.3]], [[-0.4,0.5],[0.6,0.2]]]").unwrap();
    let p = path.to_str().unwrap();
    let v = value(&zcorr(&["eval", "--k", "1", "--points", p, "--method", "berezin"]));
    let pts = vec![
        vec![c(0.0, 0.0), c(0.0, 0.0)],
        vec![c(0.7, 0.1), c(0.2, -0.3)],
        vec![c(-0.4, 0.5), c(0.6, 0.2)],
    ];
    let cfg = zcorr::kernel::PointConfig::new(pts).unwrap();
    assert!(rel(v, zcorr::correlators::k_npoint_berezin(&cfg, 1).unwrap()) <= 1e-14);

    assert_eq!(zcorr(&["eval", "--k", "1", "--m", "3", "--points", p, "--method", "berezin"]).status.code(), Some(2));
    std::fs::write(&path, "{\"not\": \"points\"}").unwrap();
    assert_eq!(zcorr(&["eval", "--k", "1", "--points", p, "--method", "berezin"]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    let o = zcorr(&["eval", "--k", "1", "--points", missing.to_str().unwrap(), "--method", "berezin"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn curve_figure_one() {
    let start = Instant::now();
    let o = zcorr(&["curve", "--m", "3", "--k", "3", "--rmin", "0.2", "--rmax", "4", "--steps", "200"]);
    assert!(start.elapsed() < Duration::from_secs(5));
    assert_eq!(o.status.code(), Some(0));
    let rows = curve_rows(&stdout(&o));
    assert_eq!(rows.len(), 200);
    assert!(rows.iter().all(|&(_, k)| k.is_finite() && k > 0.0));
    assert!(rows[0].1 > 20.0 && rel(rows[0].1, 25.0) <= 0.2);
    assert_eq!(rows[199].0, 4.0);
    let lib = zcorr::correlators::kappa_point_closed(4.0, 3).unwrap();
    assert!(rel(rows[199].1, lib) <= 1e-14);
}

#[test]
fn curve_shows_zero_repulsion() {
    let rows = curve_rows(&stdout(&zcorr(&["curve", "--m", "1", "--k", "1", "--rmin", "0.05", "--rmax", "0.5", "--steps", "10"])));
    assert!(rows.iter().all(|&(_, k)| k < 1.0));
    assert!(rows[0].1 < 0.01);
}

#[test]
fn curve_file_output_and_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k22.csv");
    let o = zcorr(&["curve", "--m", "2", "--k", "2", "--steps", "7", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).is_empty());
    assert_eq!(curve_rows(&std::fs::read_to_string(&out).unwrap()).len(), 7);

    let bad = dir.path().join("no/such/dir/k.csv");
    let o = zcorr(&["curve", "--m", "2", "--k", "2", "--out", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(zcorr(&["curve", "--m", "2", "--k", "2", "--rmin", "2", "--rmax", "1"]).status.code(), Some(2));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let runs: [&[&str]; 3] = [
        &["curve", "--m", "2", "--k", "1", "--steps", "25"],
        &["--json", "mc", "--m", "1", "--k", "1", "--r", "1", "--samples", "30000", "--seed", "5"],
        &["series", "--m", "3", "--k", "2", "--order", "8"],
    ];
    for args in runs {
        assert_eq!(zcorr(args).stdout, zcorr(args).stdout, "{args:?}");
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let args = ["mc", "--m", "2", "--k", "1", "--r", "0.7", "--samples", "40000", "--seed", "12"];
    let one = zcorr_env(&args, &[("ZCORR_THREADS", "1")]);
    let three = zcorr_env(&args, &[("ZCORR_THREADS", "3")]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, three.stdout);
    assert_eq!(zcorr_env(&args, &[("ZCORR_THREADS", "zero")]).status.code(), Some(2));
}

#[test]
fn json_envelope_carries_text_numbers() {
    let text = value(&zcorr(&["eval", "--m", "4", "--k", "2", "--r", "1.3", "--method", "berezin"]));
    let o = zcorr(&["--json", "eval", "--m", "4", "--k", "2", "--r", "1.3", "--method", "berezin"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["command"], "eval");
    assert_eq!(v["config"]["method"], "berezin");
    assert_eq!(v["result"]["value"].as_f64(), Some(text));

    let csv = stdout(&zcorr(&["curve", "--m", "1", "--k", "1", "--steps", "5"]));
    let v: Value = serde_json::from_slice(&zcorr(&["--json", "curve", "--m", "1", "--k", "1", "--steps", "5"]).stdout).unwrap();
    for (row, (r, k)) in v["result"].as_array().unwrap().iter().zip(curve_rows(&csv)) {
        assert_eq!(row["r"].as_f64(), Some(r));
        assert_eq!(row["kappa"].as_f64(), Some(k));
    }
}

#[test]
fn series_prints_exact_rationals() {
    let o = zcorr(&["series", "--m", "2", "--k", "2", "--order", "5"]);
    assert_eq!(stdout(&o), "r_power,coefficient\n0,3/4\n2,0\n4,1/24\n6,0\n8,-1/288\n");
    let v: Value = serde_json::from_slice(&zcorr(&["--json", "series", "--m", "1", "--k", "1", "--order", "6"]).stdout).unwrap();
    assert_eq!(v["result"]["var"], "u");
    assert_eq!(v["result"]["valuation"], 1);
    assert_eq!(v["result"]["coeffs"][0], "1/2");
    assert_eq!(v["result"]["coeffs"][2], "-1/36");
}

#[test]
fn ensemble_csv() {
    let o = zcorr(&["ensemble", "--degree", "60", "--trials", "40", "--seed", "3", "--edges", "0.5,1.5,2.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("r,kappa_hat,stderr,pairs"));
    let centers: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(centers, ["1", "2"]);
    assert_eq!(zcorr(&["ensemble", "--degree", "10"]).status.code(), Some(2));
    assert_eq!(zcorr(&["ensemble", "--edges", "1,0.5"]).status.code(), Some(2));
}

fn report_lines(o: &Output) -> Vec<String> {
    stdout(o).lines().map(str::to_string).collect()
}

#[test]
fn validate_fast_report() {
    let start = Instant::now();
    let o = zcorr(&["validate", "--level", "fast"]);
    assert!(start.elapsed() < Duration::from_secs(60));
    let lines = report_lines(&o);
    for id in ["1", "2", "3", "4", "5", "6"] {
        let line = lines.iter().find(|l| l.starts_with(&format!("{id} "))).unwrap();
        assert!(line.contains("PASS"), "{line}");
    }
    let any_fail = lines.iter().any(|l| l.contains(" FAIL "));
    assert_eq!(o.status.code(), Some(if any_fail { 1 } else { 0 }));
}

#[test]
fn injected_fault_is_reported() {
    let o = zcorr(&["validate", "--perturb", "4,4,8"]);
    assert_eq!(o.status.code(), Some(1));
    let line = report_lines(&o).into_iter().find(|l| l.starts_with("1 ")).unwrap();
    assert!(line.contains("FAIL") && line.contains("κ_44 r^8"), "{line}");

    let o = zcorr(&["validate", "--perturb", "2,6,-2"]);
    let line = report_lines(&o).into_iter().find(|l| l.starts_with("2 ")).unwrap();
    assert!(line.contains("FAIL") && line.contains("κ_26 r^-2"), "{line}");

    assert_eq!(zcorr(&["validate", "--perturb", "1,1,4"]).status.code(), Some(2));
}

#[test]
fn validate_full_is_deterministic() {
    let a = zcorr(&["--json", "validate", "--level", "full", "--seed", "7"]);
    let b = zcorr(&["--json", "validate", "--level", "full", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), b.status.code());
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    let ids: Vec<&str> = v["result"]["checks"].as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["1", "2", "3", "4", "5", "6", "7", "8a", "8b", "9"]);
}

#[test]
fn help_lists_subcommands() {
    let o = zcorr(&["--help"]);
    let text = stdout(&o);
    for sub in ["eval", "curve", "series", "mc", "ensemble", "validate"] {
        assert!(text.contains(sub), "{sub}");
    }
    assert!(!text.contains("perturb"));
    assert!(Path::new(env!("CARGO_BIN_EXE_zcorr")).exists());
}
