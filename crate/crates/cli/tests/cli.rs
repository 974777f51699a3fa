use std::process::Command;

use toric_renorm::io::{parse_results_csv, trace_from_json, RunManifest};

const BIN: &str = env!("CARGO_BIN_EXE_toric-renorm");

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(BIN).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn decode_empty_file_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let err = dir.path().join("e.txt");
    let trace = dir.path().join("t.json");
    std::fs::write(&err, "# nothing\n").unwrap();
    let (code, out, _) = run(&["decode", "--k", "4", "--error", err.to_str().unwrap(), "--trace", trace.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("correction weight: 0") && out.contains("verdict: SUCCESS"));
    let t = trace_from_json(&std::fs::read_to_string(trace).unwrap()).unwrap();
    assert!(t.stages.is_empty());
}

#[test]
fn decode_reports_the_bad_line() {
    let dir = tempfile::tempdir().unwrap();
    let err = dir.path().join("e.txt");
    std::fs::write(&err, "H 1 1\nH 99 0\n").unwrap();
    let (code, _, stderr) = run(&["decode", "--k", "3", "--error", err.to_str().unwrap()]);
    assert_ne!(code, 0);
    assert!(stderr.contains("line 2"), "{stderr}");
}

#[test]
fn fractal_file_decodes_wrongly() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f5.txt");
    let (code, _, _) = run(&["fractal", "--k", "5", "--out", f.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (_, out, _) = run(&["decode", "--k", "5", "--error", f.to_str().unwrap()]);
    assert!(out.contains("residual class: (1,0)") && out.contains("verdict: FAIL"), "{out}");
}

#[test]
fn zero_rate_simulation() {
    let (code, out, _) = run(&["simulate", "--k", "4", "--p", "0:0:1", "--trials", "10"]);
    assert_eq!(code, 0);
    let rows = parse_results_csv(&out).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].rate, 0.0);
    let manifest = RunManifest::from_comment_lines(&out).unwrap();
    assert_eq!(manifest.seed, 42);
}

#[test]
fn zero_trials_is_a_usage_error() {
    let (code, _, _) = run(&["simulate", "--trials", "0"]);
    assert_eq!(code, 2);
}

#[test]
fn fractal_weight_at_level_six() {
    let (code, out, _) = run(&["fractal", "--k", "6", "--verify"]);
    assert_eq!(code, 0);
    assert!(out.contains("weight=8") && out.contains("FAIL confirmed"), "{out}");
}

#[test]
fn one_d_radius_at_level_three() {
    let (code, out, _) = run(&["radius", "--mode", "1d", "--k", "3"]);
    assert_eq!(code, 0);
    assert!(out.contains("omega=2"), "{out}");
}

#[test]
fn lemma4_compliance_run() {
    let (code, out, _) = run(&["lemma4", "--k", "5", "--samples", "100", "--p", "0.04", "--seed", "7"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("flagged_stages=0"), "{out}");
}

#[test]
fn radius_budget_is_a_nonzero_exit() {
    let (code, _, stderr) = run(&["radius", "--mode", "2d", "--k", "6", "--w-max", "4"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("budget"), "{stderr}");
}
