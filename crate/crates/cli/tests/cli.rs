use std::path::Path;

use rbl_cli::run_with;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["rbl"];
    argv.extend_from_slice(args);
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn exact_forced_rainbow() {
    let (code, out, _) = run(&["exact", "--n", "2", "--s", "2", "--t", "2", "--q", "4"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["status"], "Exact");
    assert_eq!(v["value"], 4);
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let mono = dir.path().join("mono3.json");
    assert_eq!(run(&["construct", "monochromatic", "--n", "3", "--out", p(&mono)]).0, 0);
    let (code, out, _) = run(&["verify", "--coloring", p(&mono), "--s", "2", "--t", "2", "--q", "2"]);
    assert_eq!(code, 1);
    let v = json(&out);
    assert_eq!(v["status"], "Violation");
    assert_eq!(v["observed"], 1);
    assert!(v["copy"]["a_side"].is_array());

    let rb = dir.path().join("rb.json");
    run(&["construct", "rainbow", "--n", "3", "--out", p(&rb)]);
    assert_eq!(run(&["verify", "--coloring", p(&rb), "--s", "2", "--t", "2", "--q", "4"]).0, 0);
    assert_eq!(run(&["verify", "--coloring", p(&rb), "--s", "2", "--t", "4", "--q", "3"]).0, 2);
}

#[test]
fn construct_then_verify_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("star.json");
    let (code, out, _) = run(&["construct", "star-ii", "--n", "6", "--t", "4", "--q", "3", "--out", p(&f)]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["palette"], 5);
    let saved = json(&std::fs::read_to_string(&f).unwrap());
    assert_eq!(saved["claim"]["q"], 3);
    assert_eq!(run(&["verify", "--coloring", p(&f), "--s", "1", "--t", "4", "--q", "3"]).0, 0);
}

#[test]
fn usage_and_domain_errors() {
    assert_eq!(run(&["exact", "--n", "2", "--bogus"]).0, 64);
    assert_eq!(run(&["frobnicate"]).0, 64);
    assert_eq!(run(&["exact", "--n", "2", "--s", "3", "--t", "2", "--q", "2"]).0, 65);
    assert_eq!(run(&["construct", "star-i", "--n", "5", "--q", "2"]).0, 65);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn budget_exhaustion_is_not_an_error() {
    let (code, out, _) = run(&["exact", "--n", "3", "--s", "2", "--t", "2", "--q", "3", "--node-limit", "5"]);
    assert_eq!(code, 0);
    assert_ne!(json(&out)["status"], "Exact");
}

#[test]
fn lemma_a1_runs_clean() {
    let (code, out, _) = run(&["check-lemmas", "--which", "a1", "--s-max", "200", "--t-max", "600"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["violations"], Value::Array(vec![]));
    let (_, out, _) = run(&["check-lemmas", "--which", "gen-corradi", "--seeds", "50"]);
    assert_eq!(json(&out)["violations"], Value::Array(vec![]));
}

#[test]
fn bounds_report() {
    let (code, out, _) = run(&["bounds", "--s", "3", "--t", "4", "--q", "11"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["region"], "quadratic");
}

#[test]
fn energy_stats() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("m.json");
    run(&["construct", "monochromatic", "--n", "2", "--out", p(&f)]);
    let (code, out, _) = run(&["energy", "--coloring", p(&f), "--r", "2"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["edges"], 16);
    assert_eq!(v["multiplicity_power_sum"], 16);
    let (code, out, _) = run(&["energy", "--coloring", p(&f), "--r", "2", "--emit", "graph"]);
    assert_eq!(code, 0);
    assert!(json(&out).is_object());
}

#[test]
fn store_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let st = dir.path().join("store.jsonl");
    let (_, out, _) = run(&["--store", p(&st), "report"]);
    assert_eq!(json(&out)["rows"], Value::Array(vec![]));
    run(&["--store", p(&st), "exact", "--n", "4", "--s", "1", "--t", "4", "--q", "3"]);
    run(&["--store", p(&st), "exact", "--n", "4", "--s", "1", "--t", "4", "--q", "3"]);
    run(&["--store", p(&st), "exact", "--n", "3", "--s", "2", "--t", "2", "--q", "3", "--node-limit", "5"]);
    let lines = std::fs::read_to_string(&st).unwrap().lines().count();
    assert_eq!(lines, 3);
    let (code, out, _) = run(&["--store", p(&st), "report"]);
    assert_eq!(code, 0);
    let rows = json(&out)["rows"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 2);
    let star = rows.iter().find(|r| r["key"]["t"] == 4).unwrap();
    assert_eq!(star["value"], 3);
    assert_eq!(star["verdict"], "agree");
    let bracket = rows.iter().find(|r| r["key"]["t"] == 2).unwrap();
    assert_eq!(bracket["verdict"], "inconclusive");
}

#[test]
fn seeded_construction_is_reproducible() {
    let args = ["construct", "hypergraph", "--n", "8", "--s", "3", "--t", "5", "--seed", "7"];
    let (c1, a, _) = run(&args);
    let (c2, b, _) = run(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
}
