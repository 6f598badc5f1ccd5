use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const T1: &str = r#"{"n": 1, "k": [2], "r": [[0.9, 0.8]], "c": [[5, 3]], "u": [[2, 2]], "R0": 0.97}"#;

fn rap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rap")).args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn solve_t1() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "t1.json", T1);
    for strategy in ["paper", "bestfirst"] {
        let out = rap(&["solve", &f, "--strategy", strategy]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let v = json(&out);
        assert_eq!(v["opt_cost"], 8);
        assert_eq!(v["optimum"], serde_json::json!([[1, 1]]));
    }
}

#[test]
fn oracle_t1_and_infeasible() {
    let dir = TempDir::new().unwrap();
    let out = rap(&["oracle", &write(&dir, "t1.json", T1)]);
    assert!(out.status.success());
    assert_eq!(json(&out)["opt_cost"], 8);

    let hard = T1.replace("0.97", "0.9999");
    let out = rap(&["oracle", &write(&dir, "hard.json", &hard)]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["status"], "infeasible");
    assert!(v["opt_cost"].is_null());
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = rap(&["solve", &write(&dir, "bad.json", "{\"n\": 1,")]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(!bad.stderr.is_empty());

    let missing = rap(&["solve", dir.path().join("nope.json").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));

    let hard = T1.replace("0.97", "0.9999");
    assert_eq!(rap(&["solve", &write(&dir, "hard.json", &hard)]).status.code(), Some(3));

    let big = r#"{"n": 2, "k": [3, 3], "r": [[0.9, 0.9, 0.9], [0.9, 0.9, 0.9]],
        "c": [[1, 1, 1], [1, 1, 1]], "u": [[20, 20, 20], [20, 20, 20]], "R0": 0.9}"#;
    assert_eq!(rap(&["oracle", &write(&dir, "big.json", big)]).status.code(), Some(4));
}

#[test]
fn generate_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let args = ["generate", "--n", "4", "--k", "3", "--seed", "17"];
    let a = rap(&args);
    let b = rap(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let path = dir.path().join("gen.json");
    let out = rap(&[&args[..], &["-o", path.to_str().unwrap()]].concat());
    assert!(out.status.success());
    assert_eq!(fs::read(&path).unwrap(), a.stdout);

    let solved = rap(&["solve", path.to_str().unwrap()]);
    assert!(solved.status.success());
    assert!(json(&solved)["opt_reliability"].as_f64().unwrap() >= 0.90);
}

#[test]
fn testset_dump_lists_every_move() {
    let dir = TempDir::new().unwrap();
    let out = rap(&["testset", &write(&dir, "t1.json", T1)]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines.iter().filter(|l| l.starts_with("RemoveOne")).count(), 2);
    assert_eq!(lines.iter().filter(|l| l.starts_with("SwapDown")).count(), 1);
}

#[test]
fn bench_writes_csv() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bench.csv");
    let out = rap(&["bench", "--suite", "table1", "--reps", "2", "--seed", "3", "--row", "10:2", "-o", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(Path::new(&path)).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# suite=table1 seed=3"));
    assert!(lines[1].starts_with("n,k,reps"));
    assert_eq!(lines.len(), 3);
    assert!(lines[2].starts_with("10,2,2,"));
}
