use std::path::Path;
use std::process::{Command, Output};

use mflab::circle::{gauss_sum, major_arc_membership, MajorArcParams};
use mflab::variation::{variation_seminorm, TimeSeries};
use serde_json::Value;

fn mflab(args: &[&str]) -> Output {
    mflab_env(args, &[])
}

fn mflab_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mflab"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    assert_eq!(text.trim().lines().count(), 1, "one-line error expected, got {text}");
    serde_json::from_str(text.trim()).expect("stderr is JSON")
}

#[test]
fn two_term_gauss_sum_vanishes() {
    let v = stdout_json(&mflab(&["gauss-sum", "--a", "1", "--q", "2", "--b", "0", "--d", "1", "--n", "1"]));
    assert_eq!(v["re"].as_f64().unwrap(), 0.0);
    assert_eq!(v["im"].as_f64().unwrap(), 0.0);
}

#[test]
fn variation_of_single_bump() {
    let v = stdout_json(&mflab(&["variation", "--r", "2", "--samples", "0,1,0"]));
    assert!((v.as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-12);
    let ex = stdout_json(&mflab(&["variation", "--r", "2", "--samples", "0,1,0", "--exhaustive"]));
    assert_eq!(v, ex);
}

#[test]
fn half_is_a_major_arc_center() {
    let v = stdout_json(&mflab(&["arcs", "--lambda", "0.5", "--j", "10", "--eps1", "0.1", "--d", "1"]));
    assert_eq!(v, serde_json::json!({ "a": 1, "q": 2 }));
    let miss = stdout_json(&mflab(&["arcs", "--lambda", "0.123456", "--j", "10", "--eps1", "0.1"]));
    assert!(miss["a"].is_null() && miss["q"].is_null());
}

#[test]
fn adapters_match_library_bit_for_bit() {
    let v = stdout_json(&mflab(&["gauss-sum", "--a", "2", "--q", "7", "--b", "3", "--d", "1"]));
    let lib = gauss_sum(2, &[3], 7, 1, 10_000_000).unwrap();
    assert_eq!((v["re"].as_f64().unwrap(), v["im"].as_f64().unwrap()), (lib.re, lib.im));

    let v = stdout_json(&mflab(&["variation", "--r", "2.5", "--samples", "0.3,-1,2:1,0.5"]));
    let s = TimeSeries::from_scalars(&[
        num_complex::Complex64::new(0.3, 0.0),
        num_complex::Complex64::new(-1.0, 0.0),
        num_complex::Complex64::new(2.0, 1.0),
        num_complex::Complex64::new(0.5, 0.0),
    ]);
    assert_eq!(v.as_f64().unwrap(), variation_seminorm(&s, 2.5).unwrap());

    let v = stdout_json(&mflab(&["arcs", "--lambda", "0.3334", "--j", "12", "--eps1", "0.2"]));
    let lib = major_arc_membership(0.3334, &MajorArcParams::new(0.2, 12, 1).unwrap());
    assert_eq!(v["q"].as_u64(), lib.map(|r| r.q));
}

#[test]
fn parameter_errors_exit_one_with_json() {
    let out = mflab(&["gauss-sum", "--a", "1", "--q", "0", "--b", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "parameter");

    let out = mflab(&["variation", "--samples", "1,2"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "usage");
}

#[test]
fn budget_errors_exit_two() {
    let out = mflab(&["enumerate-rs", "--s", "6", "--n", "2", "--budget", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "size");
}

#[test]
fn randomized_subcommands_need_a_seed() {
    for args in [
        vec!["lemma21", "--labels", "2", "--times", "3", "--points", "4"],
        vec!["multifreq", "--labels", "2"],
        vec!["experiment", "thm1", "--sizes", "2"],
    ] {
        let out = mflab(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
    }
    let out = mflab(&["a1", "--random-labels", "2", "--N", "64"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_json(&out)["message"].as_str().unwrap().contains("--seed"));
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn config_file_env_and_flags_in_order_of_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.cfg", "# comment\nr = 2\nsamples = 0,1,0\n");
    let from_file = stdout_json(&mflab(&["variation", "--config", &cfg]));
    assert!((from_file.as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-12);

    let from_env = stdout_json(&mflab_env(&["variation", "--config", &cfg], &[("MFLAB_R", "1.5")]));
    assert!((from_env.as_f64().unwrap() - 2f64.powf(2.0 / 3.0)).abs() < 1e-12);

    let from_flag = stdout_json(&mflab_env(&["variation", "--config", &cfg, "--r", "4"], &[("MFLAB_R", "1.5")]));
    assert!((from_flag.as_f64().unwrap() - 2f64.powf(0.25)).abs() < 1e-12);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.cfg", "r = 2\nradius = 3\n");
    let out = mflab(&["variation", "--samples", "1", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_json(&out)["message"].as_str().unwrap().contains("radius"));
}

#[test]
fn boolean_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "b.cfg", "exhaustive = true\n");
    let v = stdout_json(&mflab(&["variation", "--r", "3", "--samples", "0,1,0,1", "--config", &cfg]));
    assert!(v.as_f64().unwrap() > 0.0);
}

#[test]
fn defaults_cover_every_subcommand() {
    let v = stdout_json(&mflab(&["defaults"]));
    let subs = v["subcommands"].as_object().unwrap();
    for name in [
        "variation", "jumps", "dft", "gauss-sum", "arcs", "enumerate-rs", "multiplier", "phi", "assemble-ls",
        "error-term", "carleson", "a1", "multifreq", "lemma21", "experiment thm1", "experiment a1-reduction",
        "experiment decay", "report",
    ] {
        assert!(subs.contains_key(name), "missing {name}");
    }
    assert_eq!(subs["assemble-ls"]["kappa"], "10");
    assert_eq!(v["env_prefix"], "MFLAB_");
}

#[test]
fn dft_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "f.json", r#"{"n":1,"N":4,"values":[[1,0],[2,0],[0,1],[0,0]]}"#);
    let spectrum = stdout_json(&mflab(&["dft", "--input", &input]));
    let spec_path = write(dir.path(), "F.json", &spectrum.to_string());
    let back = stdout_json(&mflab(&["dft", "--input", &spec_path, "--inverse"]));
    let want = [[1.0, 0.0], [2.0, 0.0], [0.0, 1.0], [0.0, 0.0]];
    for (got, w) in back["values"].as_array().unwrap().iter().zip(want) {
        assert!((got[0].as_f64().unwrap() - w[0]).abs() < 1e-12);
        assert!((got[1].as_f64().unwrap() - w[1]).abs() < 1e-12);
    }
}

#[test]
fn experiments_append_records_and_report_reads_them() {
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("records.jsonl");
    let rec = records.to_string_lossy().into_owned();
    let out = stdout_json(&mflab(&["experiment", "decay", "--kind", "gauss-sum", "--sweep", "3,5,7,11", "--records", &rec]));
    assert!((out["measured"]["slope"].as_f64().unwrap() + 0.5).abs() < 1e-9);
    stdout_json(&mflab(&["experiment", "thm1", "--sizes", "1,2", "--trials", "1", "--no-n-doubling", "--seed", "5", "--records", &rec]));
    assert_eq!(std::fs::read_to_string(&records).unwrap().lines().count(), 2);

    let outdir = dir.path().join("report");
    let rep = stdout_json(&mflab(&["report", "--records", &rec, "--out-dir", &outdir.to_string_lossy()]));
    assert!(rep["summary"].as_str().unwrap().contains("thm1_scaling"));
    assert!(outdir.join("decay_gauss_sum.csv").exists());
}

#[test]
fn seeded_runs_repeat_exactly() {
    let args = ["lemma21", "--labels", "3", "--times", "5", "--points", "7", "--seed", "11"];
    assert_eq!(mflab(&args).stdout, mflab(&args).stdout);
}

#[test]
fn help_exits_zero() {
    let out = mflab(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}
