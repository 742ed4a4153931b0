use std::process::{Command, Output};

use serde_json::Value;

fn slchi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slchi")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    let out = slchi(&a);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn chi_of_a_generated_subgroup() {
    let rows = json(&["chi", "--ring", "p=3,e=2", "--gens", "I+3E"]);
    assert_eq!(rows[0]["chi"], "1/6");
    assert_eq!(rows[0]["order"], "3");
    let rows = json(&["chi", "--ring", "p=3,e=2", "--gens", "I+3E", "--normal-closure"]);
    assert_eq!(rows[0]["chi"], "1/3");
    assert_eq!(rows[0]["exact_formula"]["j0=2"], "1/3");
}

#[test]
fn chi_over_a_full_lattice() {
    let rows = json(&["chi", "--ring", "p=2,e=2", "--all-subgroups"]);
    assert_eq!(rows.as_array().unwrap().len(), 52);
    assert!(rows.as_array().unwrap().iter().all(|r| r["failures"].as_array().unwrap().is_empty()));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(slchi(&["chi", "--ring", "p=3,e=2", "--gens", "2I"]).status.code(), Some(2));
    assert_eq!(slchi(&["chi", "--ring", "p=4,e=2", "--gens", "I"]).status.code(), Some(2));
    assert_eq!(slchi(&["chi", "--ring", "p=3,e=2", "--gens", "I+"]).status.code(), Some(2));
    assert_eq!(slchi(&["cusps", "--base", "Q", "--family", "gamma", "--level", "3"]).status.code(), Some(2));
    assert_eq!(slchi(&["cusps", "--base", "d=-5", "--family", "gamma0", "--level", "3"]).status.code(), Some(2));
    assert_eq!(slchi(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(slchi(&["verify", "--only", "nope"]).status.code(), Some(2));
}

#[test]
fn cusp_examples() {
    let r = json(&["cusps", "--base", "Q", "--family", "gamma0", "--level", "12"]);
    assert_eq!(r[0]["cusp_count"], 6);
    assert_eq!(r[0]["methods_agree"], true);
    let r = json(&["cusps", "--base", "d=-1", "--family", "gamma0", "--level", "(3)"]);
    assert_eq!(r[0]["cusp_count"], 2);
    let r = json(&["cusps", "--base", "d=2", "--family", "gamma", "--up-to", "9"]);
    assert!(r.as_array().unwrap().iter().all(|x| x["solved_a"] == "1"));
}

#[test]
fn csv_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ring.csv");
    let out = slchi(&["ring", "--ring", "p=2,e=3", "--check", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let mut rd = csv::Reader::from_path(&path).unwrap();
    let headers = rd.headers().unwrap().clone();
    let row = rd.records().next().unwrap().unwrap();
    let get = |k: &str| row.get(headers.iter().position(|h| h == k).unwrap()).unwrap().to_string();
    assert_eq!(get("group_order"), "384");
    assert_eq!(get("det_one_count"), "384");
    assert_eq!(get("column_count"), "48");
}

#[test]
fn slope_rows() {
    let rows = json(&["slope", "--ring", "p=3,e=3", "--gens", "I+3E", "--line", "1:0"]);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["residual"], 0);
    assert_eq!(rows[1]["boundary_corrected"], 0);
}

#[test]
fn verify_subset_is_deterministic() {
    let args = ["verify", "--only", "dyadic_words,decay", "--seed", "7", "--samples", "20", "--format", "json"];
    let a = slchi(&args);
    let b = slchi(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let rows: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 2);
    assert!(rows[0]["notes"].to_string().contains("seed 7"));
}

#[test]
fn reproducer_file_format() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rep.json");
    let f = slchi::error::Reproducer { check: "demo".into(), details: serde_json::json!({"N": 5}) };
    slchi_cli::cli::write_reproducer(&path, &["slchi".into(), "verify".into()], &[f]).unwrap();
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"][1], "verify");
    assert_eq!(v["failures"][0]["check"], "demo");
}
