use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperedge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn sample_to(dir: &Path, name: &str, extra: &[&str]) -> String {
    let path = dir.join(name);
    let p = path.to_str().unwrap().to_string();
    let mut args = vec!["sample", "--seed", "3", "--out", &p];
    args.extend_from_slice(extra);
    assert!(run(&args).status.success());
    p
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["decay", "--alpha", "banana"]).status.code(), Some(2));
    // seed is mandatory for anything random
    assert_eq!(run(&["sample"]).status.code(), Some(2));
    assert_eq!(run(&["resum"]).status.code(), Some(2));
    assert_eq!(run(&["dlr"]).status.code(), Some(2));
    // rejected parameter values are usage errors too
    assert_eq!(run(&["decay", "--alpha", "1.5"]).status.code(), Some(2));
    assert_eq!(
        run(&["clusters", "--input", "/nonexistent/file.json"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["check", "--help"]).status.code(), Some(0));
}

#[test]
fn empty_suite_passes_vacuously() {
    let v = json(&run(&["check", "--suite", "swap", "--trials", "0"]));
    assert_eq!(v["passed"], true);
    assert_eq!(v["suites"][0]["note"], "no trials");
}

#[test]
fn check_runs_a_suite_and_embeds_the_manifest() {
    let v = json(&run(&["check", "--suite", "threshold", "--trials", "5", "--seed", "4"]));
    assert_eq!(v["passed"], true);
    assert_eq!(v["manifest"]["command"], "check");
    assert_eq!(v["manifest"]["seed"], 4);
    assert!(v["manifest"]["version"].is_string());
}

#[test]
fn decay_writes_csv_with_manifest_header() {
    let out = run(&["decay", "--n", "1,10"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines().skip_while(|l| l.starts_with('#'));
    assert!(text.starts_with("# manifest:"));
    assert_eq!(lines.next().unwrap(), "n,phi,abs_phi_ln_n,tail_bound,terms,bounded");
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "1");
    let phi: f64 = first[1].parse().unwrap();
    assert!((phi - (5.0f64 / 8.0).ln()).abs() < 1e-12);
    assert_eq!(lines.next().unwrap().split(',').next_back(), Some("true"));
}

#[test]
fn sample_is_reproducible_and_respects_zero_intensity() {
    let a = run(&["sample", "--seed", "11", "--window", "box:0,0,3,3"]);
    let b = run(&["sample", "--seed", "11", "--window", "box:0,0,3,3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let empty = json(&run(&[
        "sample",
        "--seed",
        "1",
        "--lambda-plus",
        "0",
        "--lambda-minus",
        "0",
    ]));
    assert_eq!(empty["points"].as_array().unwrap().len(), 0);
    let wrong = run(&["sample", "--seed", "1", "--dim", "3", "--window", "box:0,0,1,1"]);
    assert_eq!(wrong.status.code(), Some(2));
}

#[test]
fn clusters_and_vacuum_read_sampled_configurations() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = sample_to(dir.path(), "c.json", &["--window", "box:0,0,1.5,1.5", "--t", "1"]);
    let sampled: Value = serde_json::from_str(&std::fs::read_to_string(&cfg).unwrap()).unwrap();
    let n = sampled["points"].as_array().unwrap().len();

    let c = json(&run(&["clusters", "--input", &cfg, "--r", "0.5"]));
    assert_eq!(c["labels"].as_array().unwrap().len(), n);
    let total: usize = c["blocks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b.as_array().unwrap().len())
        .sum();
    assert_eq!(total, n);

    let out = run(&["vacuum", "--input", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# manifest:"));
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "edge,marks,value");
    // every singleton has a nonzero potential
    let singles = rows[1..]
        .iter()
        .filter(|r| !r.split(',').next().unwrap().contains(';'))
        .count();
    assert_eq!(singles, n);

    let tiny_cap = run(&["vacuum", "--input", &cfg, "--family", "all", "--cap", "2"]);
    if n > 2 {
        assert_eq!(tiny_cap.status.code(), Some(2));
    }
}

#[test]
fn resum_reports_equivalence() {
    let v = json(&run(&[
        "resum",
        "--seed",
        "2",
        "--window",
        "box:0,0,5,5",
        "--variants",
        "3",
    ]));
    assert!(v["equivalence"]["spread"].as_f64().unwrap() < 1e-6);
    assert_eq!(v["nondecreasing"], true);
    assert!(!v["cells"].as_array().unwrap().is_empty());
    let ti = json(&run(&[
        "resum",
        "--seed",
        "2",
        "--variant",
        "ti",
        "--window",
        "box:0,0,5,5",
        "--variants",
        "2",
    ]));
    assert_eq!(ti["variant"], "translation-invariant");
}

#[test]
fn dlr_reports_z_and_detects_a_tilt() {
    let ok = json(&run(&[
        "dlr",
        "--model",
        "poisson",
        "--observable",
        "count",
        "--n",
        "4000",
        "--outer",
        "4000",
        "--inner",
        "40",
        "--seed",
        "5",
    ]));
    assert!(ok["z"].as_f64().unwrap().abs() < 4.5, "{ok}");
    assert_eq!(ok["manifest"]["seed"], 5);
    let bad = json(&run(&[
        "dlr",
        "--model",
        "poisson",
        "--observable",
        "count",
        "--tilt",
        "0.05",
        "--n",
        "20000",
        "--outer",
        "20000",
        "--inner",
        "100",
        "--seed",
        "5",
    ]));
    assert!(bad["z"].as_f64().unwrap().abs() > 10.0, "{bad}");
    assert_eq!(bad["consistent"], false);
}

#[test]
fn timing_is_opt_in() {
    let plain = json(&run(&["decay", "--n", "1"]).pipe_csv());
    assert!(plain.get("wall_time_ms").is_none());
    let timed = json(&run(&["--timing", "check", "--suite", "swap", "--trials", "0"]));
    assert!(timed["manifest"]["wall_time_ms"].is_number());
}

trait PipeCsv {
    fn pipe_csv(self) -> Output;
}

impl PipeCsv for Output {
    /// Turns the CSV manifest header into a JSON document on stdout.
    fn pipe_csv(mut self) -> Output {
        let text = String::from_utf8(self.stdout).unwrap();
        let header = text
            .lines()
            .next()
            .unwrap()
            .trim_start_matches("# manifest:")
            .trim()
            .to_string();
        self.stdout = header.into_bytes();
        self
    }
}
