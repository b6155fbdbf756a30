use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qcodes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcodes")).args(args).output().expect("spawn qcodes")
}

fn json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stdout);
    let last =
        text.lines().last().unwrap_or_else(|| panic!("no output; stderr: {}", String::from_utf8_lossy(&out.stderr)));
    serde_json::from_str(last).expect("json line")
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

/// Builds the [21,9] code over F_5 and returns the directory holding its files.
fn f5_code() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let out = qcodes(&[
        "qbch",
        "build",
        "--q",
        "5",
        "--m",
        "7",
        "--l",
        "3",
        "--s",
        "2",
        "--delta",
        "3",
        "--out",
        &p(dir.path(), "code.txt"),
        "--spec-out",
        &p(dir.path(), "spec.txt"),
        "--recipe-out",
        &p(dir.path(), "recipe.json"),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!((v["n"].as_u64(), v["k"].as_u64()), (Some(21), Some(9)));
    dir
}

#[test]
fn field_line() {
    let out = qcodes(&["field", "--p", "2", "--degree", "2"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["field"], "GF 2 2 1 1 1");
}

#[test]
fn bad_input_exits_with_two() {
    assert_eq!(qcodes(&["field", "--p", "4", "--degree", "1"]).status.code(), Some(2));
    assert_eq!(qcodes(&["field", "--p", "2", "--degree", "2", "--modulus", "1,0,1"]).status.code(), Some(2));
    assert_eq!(qcodes(&["nonsense"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = p(dir.path(), "bad.txt");
    fs::write(&bad, "code 2 3 1 3 1\n1 1\n").unwrap();
    let out = qcodes(&["distance", "--code", &bad]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"].as_str().unwrap().contains("line"));
}

#[test]
fn root_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let root = p(dir.path(), "root.txt");
    let out = qcodes(&["root", "--q", "2", "--s", "3", "--l", "2", "--m", "21", "--out", &root]);
    assert!(out.status.success());
    let hash = json(&out)["root_hash"].clone();
    let check = qcodes(&["root", "--verify", &root, "--m", "21"]);
    assert!(check.status.success());
    assert_eq!(json(&check)["root_hash"], hash);
    let wrong = qcodes(&["root", "--verify", &root, "--m", "7"]);
    assert_eq!(wrong.status.code(), Some(1));
    assert_eq!(json(&wrong)["verified"], false);
}

#[test]
fn distance_methods_agree() {
    let dir = f5_code();
    let code = p(dir.path(), "code.txt");
    let a = json(&qcodes(&["distance", "--code", &code]));
    let b = json(&qcodes(&["distance", "--code", &code, "--method", "lowweight", "--blocks"]));
    assert_eq!(a["upper"], 4);
    assert_eq!(a["exact"], true);
    assert_eq!(b["upper"], a["upper"]);
    assert_eq!(b["block_distance"], 3);
    let capped = qcodes(&["distance", "--code", &code, "--budget", "100"]);
    assert_eq!(capped.status.code(), Some(1));
}

#[test]
fn decode_single_block_error() {
    let dir = f5_code();
    let spec = p(dir.path(), "spec.txt");
    let code = p(dir.path(), "code.txt");
    let mut word = vec!["0"; 21];
    word[4] = "2";
    let word = word.join(",");
    for strategy in ["support", "linear"] {
        let out =
            qcodes(&["qbch", "decode", "--spec", &spec, "--code", &code, "--word", &word, "--strategy", strategy]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let v = json(&out);
        assert_eq!(v["support"], serde_json::json!([1]));
        assert_eq!(v["verified"], true);
        assert_eq!(v["codeword"], vec!["0"; 21].join(","));
    }
}

#[test]
fn simulate_is_deterministic() {
    let dir = f5_code();
    let spec = p(dir.path(), "spec.txt");
    let run = |name: &str, seed: &str| {
        let path = p(dir.path(), name);
        let out =
            qcodes(&["simulate", "--spec", &spec, "--weight", "1", "--trials", "50", "--seed", seed, "--out", &path]);
        assert!(out.status.success());
        assert_eq!(json(&out)["corrected"], 50);
        fs::read(path).unwrap()
    };
    let a = run("a.jsonl", "7");
    assert_eq!(a, run("b.jsonl", "7"));
    assert_ne!(a, run("c.jsonl", "8"));
    assert_eq!(a.iter().filter(|&&b| b == b'\n').count(), 50);
}

#[test]
fn export_rebuilds_from_recipe() {
    let dir = f5_code();
    let out = qcodes(&[
        "export",
        "--recipe",
        &p(dir.path(), "recipe.json"),
        "--seed",
        "1",
        "--out",
        &p(dir.path(), "entry.json"),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["parameters"], "[21,9,4]_5");
    assert_eq!(v["root_hash"].as_str().map(str::len), Some(64));
    let saved: Value = serde_json::from_str(&fs::read_to_string(p(dir.path(), "entry.json")).unwrap()).unwrap();
    assert_eq!(saved, v);

    let recipe: qcodes::recipe::Recipe = serde_json::from_value(v["recipe"].clone()).unwrap();
    let code = qcodes::io::parse_code(&fs::read_to_string(p(dir.path(), "code.txt")).unwrap()).unwrap();
    assert_eq!(recipe.build().unwrap(), code);
}

#[test]
fn evaluation_code_build() {
    let dir = tempfile::tempdir().unwrap();
    let root = p(dir.path(), "root.txt");
    assert!(qcodes(&["root", "--q", "4", "--l", "2", "--m", "15", "--out", &root]).status.success());
    let out = qcodes(&[
        "evalcode",
        "build",
        "--q",
        "4",
        "--l",
        "2",
        "--k",
        "3",
        "--root",
        &root,
        "--proj",
        "row:1",
        "--out",
        &p(dir.path(), "e.txt"),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["n"], 30);
    assert_eq!(v["quasi_cyclic"], true);
    let d = json(&qcodes(&["distance", "--code", &p(dir.path(), "e.txt")]));
    assert_eq!(d["n"], 30);
    assert_eq!(d["k"], v["k"]);
}

#[test]
fn verify_paper_reports_each_criterion() {
    let out = qcodes(&["verify-paper", "--only", "2,6"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    let ids: Vec<u64> =
        text.lines().map(|l| serde_json::from_str::<Value>(l).unwrap()["id"].as_u64().unwrap()).collect();
    assert_eq!(ids, [2, 6]);
    assert!(String::from_utf8_lossy(&out.stderr).lines().all(|l| l.starts_with("PASS")));
    assert_eq!(qcodes(&["verify-paper", "--only", "9"]).status.code(), Some(2));
}
