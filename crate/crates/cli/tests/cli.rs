use std::process::{Command, Output};

use serde_json::Value;

fn hm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hm"))
        .args(args)
        .env_remove("HM_THREADS")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = hm(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn asymptotic_example() {
    assert_eq!(json(&["asymptotic", "|tr(a^2)|^2"])["predicted"], 2);
    assert_eq!(json(&["asymptotic", "|tr(a^2)|^4"])["predicted"], 8);
    assert_eq!(json(&["asymptotic", "tr(a)"])["predicted"], 0);
}

#[test]
fn moment_example_and_float_consistency() {
    let v = json(&["moment", "--N", "3", "|tr(a)|^2"]);
    assert_eq!(v["exact"]["num"], "1");
    assert_eq!(v["exact"]["den"], "1");
    let v = json(&["moment", "--N", "3", "tr(aba^-1b^-1)"]);
    assert_eq!(v["exact"]["num"], "1");
    assert_eq!(v["exact"]["den"], "3");
    assert_eq!(v["float"].as_f64().unwrap(), 1.0 / 3.0);
    assert_eq!(v["N"], 3);
    assert!(v["tuples"].as_u64().unwrap() > 0);
}

#[test]
fn wg_table_json_and_csv() {
    let v = json(&["wg-table", "--n", "2", "--N", "3"]);
    let rows = v["values"].as_array().unwrap();
    assert_eq!(rows[0]["cycle_type"], serde_json::json!([1, 1]));
    assert_eq!((rows[0]["num"].as_str(), rows[0]["den"].as_str()), (Some("1"), Some("8")));
    assert_eq!((rows[1]["num"].as_str(), rows[1]["den"].as_str()), (Some("-1"), Some("24")));

    let out = hm(&["wg-table", "--n", "2", "--N", "3", "--format", "csv"]);
    assert!(out.status.success());
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let records: Vec<Vec<String>> = reader
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect();
    assert_eq!(records, [["[1,1]", "1", "8"], ["[2]", "-1", "24"]]);
}

#[test]
fn refusals_exit_with_one() {
    let out = hm(&["moment", "--N", "3", "--guard", "100", "|tr(a^4)|^2"]);
    assert_eq!(out.status.code(), Some(1));
    let out = hm(&["moment", "--N", "3", "|tr(a^4)|^2"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&["moment", "--N", "3", "--pseudo-inverse", "|tr(a^4)|^2"]);
    assert_eq!(v["exact"]["num"], "3");
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["moment", "--N", "3", "|tr(a)|^3"],
        vec!["moment", "--N", "3", "tr(a"],
        vec!["moment", "3", "tr(a)"],
        vec!["frobnicate"],
        vec!["mc", "--N", "2", "--samples", "10", "tr(a)"],
    ] {
        assert_eq!(hm(&args).status.code(), Some(2), "{args:?}");
    }
    let out = hm(&["asymptotic", "|tr(a)|^3"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("byte 8"));
}

#[test]
fn mc_is_reproducible_and_thread_independent() {
    let args = ["mc", "--N", "2", "--samples", "5000", "--seed", "17", "|tr(ab)|^2"];
    let a = json(&args);
    let out = Command::new(env!("CARGO_BIN_EXE_hm"))
        .args(args)
        .env("HM_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
    let b: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(a, b);
    assert_eq!(a["samples"], 5000);
    assert_eq!(a["seed"], 17);
    let mean = a["mean_re"].as_f64().unwrap();
    let se = a["stderr"].as_f64().unwrap();
    assert!((mean - 1.0).abs() <= 4.0 * se);
}

#[test]
fn scan_rows() {
    let v = json(&["scan", "--N-list", "2,3,4,5,6", "|tr(aba^-1b^-1)|^2"]);
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
    assert_eq!(v["non_increasing"], true);
    assert_eq!(v["predicted"], 1);
}

#[test]
fn verify_passes_at_defaults() {
    let v = json(&["verify"]);
    assert_eq!(v["ok"], true);
    assert!(v["oracle_checks"].as_u64().unwrap() > 0);
    assert!(v["path_checks"].as_u64().unwrap() > 0);
    let v = json(&["verify", "--max-letters", "4", "--N-list", "2,4"]);
    assert_eq!(v["ok"], true);
}
