//! End-to-end runs of the `wdl` binary: output shape, exact values, exit
//! codes and reproducibility across thread counts.

use std::process::{Command, Output};

use serde_json::Value;

fn wdl(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_wdl"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("WDL_THREADS", t),
        None => cmd.env_remove("WDL_THREADS"),
    };
    cmd.output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.push("--no-timestamp");
    let out = wdl(&all, None);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn row<'a>(v: &'a Value, key: &str) -> &'a Value {
    v["rows"].as_array().unwrap().iter().find(|r| r["key"] == key).unwrap_or_else(|| panic!("no row {key}"))
}

#[test]
fn tate_multiplicative_at_37() {
    let v = json(&["tate", "--curve", "0,0,1,-1,0", "--p", "37"]);
    assert_eq!(v["schema"], "1");
    assert_eq!(v["kodaira"], "I1");
    assert_eq!(v["fp"], 1);
    assert_eq!(v["n"], 1);
    assert_eq!(v["level"], 0);
    assert!(v["split"].is_boolean());
    assert_eq!(v["minimal_eq"].as_array().unwrap().len(), 5);
}

#[test]
fn tate_additive_at_5() {
    let v = json(&["tate", "--curve", "0,0,0,0,5", "--p", "5"]);
    assert_eq!(v["kodaira"], "II");
    assert_eq!(v["fp"], 2);
    assert_eq!(v["cp"], 1);
    assert_eq!(v["split"], Value::Null);
}

#[test]
fn tate_accepts_leading_negative_coefficient() {
    let v = json(&["tate", "--curve", "-1,0,0,0,1", "--p", "3"]);
    assert_eq!(v["curve"][0], "-1");
}

#[test]
fn exit_codes() {
    let singular = wdl(&["tate", "--curve", "0,0,0,0,0", "--p", "5"], None);
    assert_eq!(singular.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&singular.stderr).contains("singular"));
    assert_eq!(wdl(&["tate", "--curve", "0,0,0,0", "--p", "5"], None).status.code(), Some(1));
    assert_eq!(wdl(&["tate", "--curve", "0,0,0,0,1", "--p", "4"], None).status.code(), Some(1));
    assert_eq!(wdl(&["tate", "--p", "5"], None).status.code(), Some(1));
    assert_eq!(wdl(&["frobnicate"], None).status.code(), Some(1));
    assert_eq!(wdl(&["local", "--p", "2", "--mode", "formula", "--key", "nope"], None).status.code(), Some(1));
    assert_eq!(wdl(&["tate", "--curve", "0,0,0,0,5", "--p", "5"], Some("0")).status.code(), Some(1));
    assert_eq!(wdl(&["--help"], None).status.code(), Some(0));
}

#[test]
fn local_exact_type_table_matches_formula() {
    let v = json(&["local", "--p", "2", "--mode", "exact", "--key", "type", "--compare-formula"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|r| r["verdict"] == "MATCH"), "{rows:?}");
    assert_eq!(row(&v, "I0")["lower"], "1/2");
    assert_eq!(row(&v, "II*")["upper"], "1/1024");
    assert_eq!(row(&v, "non-minimal")["lower"], "1/1024");
    assert_eq!(v["mismatches"], 0);
}

#[test]
fn local_formula_conductor_at_3() {
    let v = json(&["local", "--p", "3", "--mode", "formula", "--key", "fp"]);
    // 15120/3^12 in lowest terms.
    assert_eq!(row(&v, "fp=2")["lower"], "560/19683");
    assert_eq!(row(&v, "fp=3")["lower"], "9760/177147");
}

#[test]
fn local_mc_conductor_at_5() {
    let v = json(&["local", "--p", "5", "--mode", "mc", "--n", "200000", "--seed", "1", "--key", "fp", "--compare-formula"]);
    let r = row(&v, "fp=2");
    assert_eq!(r["formula"], "390624/9765625");
    assert_eq!(r["verdict"], "CONSISTENT");
    let est = r["estimate"].as_f64().unwrap();
    assert!((est - (1.0 / 25.0 - 5f64.powi(-10))).abs() < 4.0 * r["stderr"].as_f64().unwrap());
    assert_eq!(v["seed"], 1);
}

#[test]
fn global_formula_only() {
    let v = json(&["global", "--property", "good-at", "--primes", "2,3", "--formula-only"]);
    assert_eq!(v["exact"], "839808/2516921");
    let s = json(&["global", "--property", "squarefree-disc", "--formula-only"]);
    assert!((s["value"].as_f64().unwrap() - 0.428_249_56).abs() < 1e-8);
    assert!(s["tail_bound"].as_str().unwrap().contains('/'));
    let t = json(&["global", "--property", "type-at", "--types", "5:III*", "--formula-only"]);
    assert_eq!(t["exact"], "5/2441406");
}

#[test]
fn global_estimate_report() {
    let v = json(&["global", "--property", "semistable-curve", "--x", "1000", "--n", "20000", "--b", "1000", "--seed", "1"]);
    assert_eq!(v["seed"], 1);
    assert!(v["tail_allowance"].as_str().unwrap().contains('/'));
    assert!((v["expected"].as_f64().unwrap() - 0.6085).abs() < 1e-3);
    assert_eq!(v["within_3sigma"], true);
}

#[test]
fn csv_output() {
    let out = wdl(&["local", "--p", "2", "--mode", "formula", "--key", "type", "--format", "csv"], None);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("key,lower,upper"));
    assert_eq!(lines.next(), Some("I0,1/2,1/2"));
}

#[test]
fn identical_output_across_thread_counts() {
    let runs: &[&[&str]] = &[
        &["global", "--property", "squarefree-disc", "--n", "5000", "--seed", "3", "--no-timestamp"],
        &["local", "--p", "3", "--mode", "mc", "--n", "20000", "--key", "tamagawa", "--no-timestamp"],
        &["global", "--property", "squarefree-a3b2", "--n", "5000", "--no-timestamp"],
    ];
    for args in runs {
        let one = wdl(args, Some("1"));
        let eight = wdl(args, Some("8"));
        assert!(one.status.success());
        assert_eq!(one.stdout, eight.stdout, "{args:?}");
    }
}

#[test]
fn verify_lemmas_passes() {
    let v = json(&["verify", "--suite", "lemmas"]);
    assert_eq!(v["passed"], true);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r["result"] == "PASS"));
}

#[test]
fn verify_local_exact_passes() {
    let v = json(&["verify", "--suite", "local-exact"]);
    assert_eq!(v["passed"], true);
}

#[test]
fn verify_all_quick_passes() {
    let v = json(&["verify", "--suite", "all", "--quick"]);
    assert_eq!(v["passed"], true, "{v}");
}
