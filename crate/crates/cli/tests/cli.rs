use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn vcgrp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vcgrp"))
        .args(args)
        .env_remove("VCGRP_SEED")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const COSET: &str = r#"{"group":{"kind":"cyclic_product","moduli":[4,6]},
    "set":{"kind":"subgroup_union","generators":[[2,0],[0,3]],"representatives":[[1,1]]}}"#;

const AP_GRID: &str = r#"{
    "group": {"kind": "cyclic", "n": 1009},
    "set": {"kind": "ap", "start": 5, "step": 3, "length": 200},
    "operation": {"op": "periods", "method": "sample"},
    "grid": {"epsilon": ["1/2", "1/4"], "seeds": [1, 2]}
}"#;

#[test]
fn vcd_of_a_coset_is_zero() {
    let out = vcgrp(&["vcd", "--set", COSET]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["dimension"], 0);

    let ap = r#"{"group":{"kind":"cyclic","n":1000},"set":{"kind":"ap","start":0,"step":7,"length":9}}"#;
    let out = vcgrp(&["vcd", "--set", ap]);
    assert_eq!(stdout_json(&out)["dimension"], 2);
}

#[test]
fn set_descriptors_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "a.json", COSET);
    let out = vcgrp(&["vcd", "--set", &path, "--scope", "global"]);
    assert!(out.status.success());
    // All translates of a proper coset: A itself and sets disjoint from it.
    assert_eq!(stdout_json(&out)["dimension"], 1);
}

#[test]
fn run_config_with_a_coset_cell() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"{"group":{"kind":"cyclic","n":60},
        "set":{"kind":"subgroup_union","generators":[12],"representatives":[7]},
        "operation":{"op":"vcd"}}"#;
    let path = write(dir.path(), "c.json", config);
    let out = vcgrp(&["run", "--config", &path]);
    assert!(out.status.success());
    let report = stdout_json(&out);
    assert_eq!(report["cells"][0]["value"], 0);
    assert_eq!(report["cells"][0]["result"]["dimension"], 0);
    assert_eq!(report["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn periods_grid_is_sound_and_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "grid.json", AP_GRID);
    let one = vcgrp(&["run", "--config", &path, "--threads", "1"]);
    let four = vcgrp(&["run", "--config", &path, "--threads", "4"]);
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
    let report = stdout_json(&one);
    let summary = &report["summary"];
    assert_eq!(summary["cells"], 4);
    assert_eq!(summary["errors"], 0);
    assert_eq!(summary["hard_checks_failed"], 0);
    // The summary is a recount of the cells.
    let passed: usize = report["cells"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|c| c["checks"].as_array().unwrap())
        .filter(|k| k["hard"] == true && k["passed"] == true)
        .count();
    assert_eq!(summary["hard_checks_passed"], passed);
    for cell in report["cells"].as_array().unwrap() {
        assert_eq!(cell["result"]["composition_sound"], true);
        assert!(cell["value"].as_u64().unwrap() > 0);
    }
}

#[test]
fn seed_flag_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let config = AP_GRID.replace(r#", "seeds": [1, 2]"#, "");
    let path = write(dir.path(), "grid.json", &config);
    let flag = vcgrp(&["run", "--config", &path, "--seed", "41"]);
    let env = Command::new(env!("CARGO_BIN_EXE_vcgrp"))
        .args(["run", "--config", &path])
        .env("VCGRP_SEED", "41")
        .output()
        .unwrap();
    assert_eq!(flag.stdout, env.stdout);
    let report = stdout_json(&flag);
    assert_eq!(report["seed"], 41);
    assert_eq!(report["cells"][1]["seed"], 41);
    let other = vcgrp(&["run", "--config", &path, "--seed", "42"]);
    assert_ne!(flag.stdout, other.stdout);
}

#[test]
fn csv_rows_have_the_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "grid.json", AP_GRID);
    let out_path = dir.path().join("report.csv");
    let out = vcgrp(&["run", "--config", &path, "--format", "csv", "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "operation,cell,epsilon,d,seed,status,metric,value,hard_passed,hard_failed,failed_checks,error"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].starts_with("periods,0,1/2,,1,ok,size,"));
    assert!(rows[3].starts_with("periods,3,1/4,,2,ok,size,"));
}

#[test]
fn malformed_config_reports_a_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "bad.json", "{\n  \"operation\": {\"op\": \"vcd\"},\n  \"grid\": [\n}");
    let out = vcgrp(&["run", "--config", &path]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json") && err.contains("line 4"), "{err}");
}

#[test]
fn infeasible_cells_are_recorded_and_fail_the_run() {
    let dir = tempfile::tempdir().unwrap();
    // An empty set cannot be sampled from; the other cell still runs.
    let config = r#"{"group":{"kind":"cyclic","n":50},"set":{"kind":"explicit","elements":[]},
        "operation":{"op":"periods","method":"sample"},"grid":{"epsilon":["1/2"],"seeds":[1,2]}}"#;
    let path = write(dir.path(), "c.json", config);
    let out = vcgrp(&["run", "--config", &path]);
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_json(&out);
    assert_eq!(report["summary"]["errors"], 2);
    assert!(report["cells"][0]["error"].as_str().unwrap().contains("non-empty"));
}

#[test]
fn bohr_freiman_and_stability() {
    let out = vcgrp(&[
        "bohr",
        "--group",
        r#"{"kind":"cyclic","n":100}"#,
        "--freqs",
        "[[1]]",
        "--radius",
        "1/2",
        "--check-size-bound",
        "--regular-dilate",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let bohr = stdout_json(&out);
    // 2 sin(π|x|/100) ≤ 1/2 exactly for |x| ≤ 8.
    assert_eq!(bohr["size"], 17);
    assert_eq!(bohr["size_bound"]["arc_pass"], true);

    let map = r#"{"source":{"kind":"cyclic","n":20},"target":{"kind":"cyclic","n":5},"pairs":[[0,0],[1,1],[2,2],[3,4]]}"#;
    let out = vcgrp(&["freiman-check", "--map", map, "--s", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["status"], "violation");

    let ap = r#"{"group":{"kind":"cyclic","n":40},"set":{"kind":"ap","start":0,"step":1,"length":10}}"#;
    let out = vcgrp(&["stability", "--set", ap, "--k", "3"]);
    let status = stdout_json(&out);
    assert_eq!(status["status"], "unstable");
    assert_eq!(status["witness"]["verified"], true);
}

#[test]
fn bad_arguments() {
    let out = vcgrp(&["periods", "--set", COSET, "--epsilon", "one half"]);
    assert_eq!(out.status.code(), Some(2));
    let out = vcgrp(&["periods", "--set", COSET, "--epsilon", "1/4", "--exact", "--bohr"]);
    assert_eq!(out.status.code(), Some(2));
    let out = vcgrp(&["conv", "--set", COSET, "--backend", "abacus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("naive"));
}

#[test]
fn selftest_subset_with_known_red_clause() {
    let out = vcgrp(&["selftest", "--level", "quick", "--criterion", "1", "--criterion", "bohr"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    let results = report["results"].as_array().unwrap();
    assert_eq!(results[0]["passed"], true);
    // The stated Bohr size bound is false and is reported as such.
    assert_eq!(results[1]["passed"], false);
    assert!(report["unexpected"].as_array().unwrap().is_empty());
}
