//! The `biiso` binary: exit codes, report layout and determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use biiso::lattice::{zset_to_json, ZSet};
use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data").join(name)
}

fn biiso(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biiso")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn no_arguments_prints_usage() {
    let out = biiso(&[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn small_truncation_is_rejected() {
    assert_eq!(biiso(&["--n", "3", "paper-examples"]).status.code(), Some(1));
    assert_eq!(biiso(&["--k", "4", "paper-examples"]).status.code(), Some(1));
    assert_eq!(biiso(&["--bogus", "paper-examples"]).status.code(), Some(1));
}

#[test]
fn model_report_layout() {
    let sym = data("diag_mixed.json");
    let out = biiso(&["model", "--symbol", path(&sym), "--n", "12"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["status"], "ok");
    assert_eq!(r["config"]["n"], 12);
    for key in ["residuals", "dims", "roundtrip_error", "verdicts"] {
        assert!(r["results"].get(key).is_some(), "missing {key}");
    }
    assert!(r["results"]["roundtrip_error"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn classify_finds_the_shift() {
    let dir = tempfile::tempdir().unwrap();
    let a = ZSet::new(0, 3, vec![true, false, true, true], biiso::lattice::Tail::AllOut, biiso::lattice::Tail::AllIn).unwrap();
    let pa = dir.path().join("a.json");
    let pb = dir.path().join("b.json");
    std::fs::write(&pa, zset_to_json(&a)).unwrap();
    std::fs::write(&pb, zset_to_json(&a.translate(5))).unwrap();
    let out = biiso(&["lattice", "classify", "--zset", path(&pa), "--zset", path(&pb)]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["results"]["equivalent"], true);
    assert_eq!(r["results"]["shift"], 5);
}

#[test]
fn pair_round_trip_is_certified() {
    let out = biiso(&["bcl", "roundtrip", "--pair", path(&data("swap.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(r["results"]["equivalence"]["witness_residual"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let sym = data("diag_mixed.json");
    let runs: Vec<Vec<u8>> = (0..2)
        .map(|i| {
            let o = dir.path().join(format!("r{i}.json"));
            let out = biiso(&["--n", "8", "-o", path(&o), "double", "--symbol", path(&sym)]);
            assert_eq!(out.status.code(), Some(0));
            std::fs::read(&o).unwrap()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn input_and_verification_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(biiso(&["model", "--symbol", path(&bad)]).status.code(), Some(1));
    assert_eq!(biiso(&["model", "--symbol", path(&dir.path().join("missing.json"))]).status.code(), Some(1));

    // W₀ = I/2 is not an isometry
    let half = serde_json::json!({
        "labels": [[0, 0], [1, 0]],
        "w0": [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]],
        "w1": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]],
        "interior": [[0, 0], [1, 0]],
    });
    let p = dir.path().join("half.json");
    std::fs::write(&p, half.to_string()).unwrap();
    assert_eq!(biiso(&["charfn", "--bi", path(&p)]).status.code(), Some(2));
}

#[test]
fn every_subcommand_answers() {
    let shift = data("shift.json");
    let zset = data("even.json");
    let stair = data("zigzag.json");
    let pair = data("swap.json");
    let rotated = data("rotated_swap.json");
    let cases: Vec<Vec<&str>> = vec![
        vec!["--n", "8", "wold", "--symbol", path(&shift)],
        vec!["--n", "8", "bishift", "--symbol", path(&shift)],
        vec!["--n", "8", "bcl", "from-symbol", "--symbol", path(&shift)],
        vec!["bcl", "build", "--pair", path(&pair)],
        vec!["bcl", "equiv", "--pair", path(&pair), "--pair", path(&rotated)],
        vec!["lattice", "period", "--zset", path(&zset)],
        vec!["lattice", "staircase", "--staircase", path(&stair)],
        vec!["lattice", "restrict", "--staircase", path(&stair)],
        vec!["lattice", "fiber", "--zset", path(&zset), "--theta", "0.7"],
        vec!["lattice", "commutant", "--pair", path(&pair)],
        vec!["paper-examples"],
    ];
    for args in cases {
        let out = biiso(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(report(&out)["status"], "ok", "{args:?}");
    }
}
