//! Frozen outputs of small deterministic runs. Numbers are compared to a
//! relative 1e-12 so that libm differences across platforms do not matter;
//! everything else must match exactly.

use serde_json::Value;
use std::path::Path;
use std::process::Command;

const REL_TOL: f64 = 1e-12;

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Runs the binary with its output directory set to a fresh temp dir and
/// returns that dir.
fn run(args: &[&str]) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_lindff"))
        .args(args)
        .env("LINDFF_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    dir
}

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= REL_TOL * a.abs().max(b.abs())
}

fn same_json(a: &Value, b: &Value, at: &str) {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            assert!(close(x, y), "{at}: {x} vs {y}");
        }
        (Value::Array(x), Value::Array(y)) => {
            assert_eq!(x.len(), y.len(), "{at}: length");
            for (i, (p, q)) in x.iter().zip(y).enumerate() {
                same_json(p, q, &format!("{at}[{i}]"));
            }
        }
        (Value::Object(x), Value::Object(y)) => {
            assert!(x.keys().eq(y.keys()), "{at}: keys differ");
            for (k, v) in x {
                same_json(v, &y[k], &format!("{at}.{k}"));
            }
        }
        _ => assert_eq!(a, b, "{at}"),
    }
}

fn same_jsonl(got: &str, want: &str) {
    let (g, w): (Vec<_>, Vec<_>) = (got.lines().collect(), want.lines().collect());
    assert_eq!(g.len(), w.len(), "record count");
    for (i, (a, b)) in g.iter().zip(&w).enumerate() {
        let a: Value = serde_json::from_str(a).unwrap();
        let b: Value = serde_json::from_str(b).unwrap();
        same_json(&a, &b, &format!("record {i}"));
    }
}

fn same_csv(got: &str, want: &str) {
    let (g, w): (Vec<_>, Vec<_>) = (got.lines().collect(), want.lines().collect());
    assert_eq!(g.len(), w.len(), "row count");
    for (i, (a, b)) in g.iter().zip(&w).enumerate() {
        let (a, b): (Vec<_>, Vec<_>) = (a.split(',').collect(), b.split(',').collect());
        assert_eq!(a.len(), b.len(), "row {i}");
        for (x, y) in a.iter().zip(&b) {
            match (x.parse::<f64>(), y.parse::<f64>()) {
                (Ok(x), Ok(y)) => assert!(close(x, y), "row {i}: {x} vs {y}"),
                _ => assert_eq!(x, y, "row {i}"),
            }
        }
    }
}

fn check(args: &[&str], stem: &str) {
    let dir = run(args);
    let read = |ext: &str| std::fs::read_to_string(dir.path().join(format!("{stem}.{ext}"))).unwrap();
    same_jsonl(&read("jsonl"), &golden(&format!("{stem}.jsonl")));
    same_csv(&read("csv"), &golden(&format!("{stem}.csv")));
}

#[test]
fn ff_vs_dilated_cost_table() {
    check(&["bench", "ff-vs-dilated", "--t", "1,2,4,8", "--eps", "0.1"], "bench-ff-vs-dilated");
    let csv = golden("bench-ff-vs-dilated.csv");
    assert!(csv.lines().any(|l| l.starts_with("8.0,0.1,51200,10,16,12.8,51200,640.0,")));
}

#[test]
fn bounds_worked_cell() {
    check(&["bounds", "--N", "10", "--p", "0.5", "--c", "0.3"], "bounds");
    let row: Vec<f64> = golden("bounds.csv").lines().nth(1).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    // Two-sided tail 112/1024 and Hoeffding 2e^{-1.8}.
    assert!(close(row[3], 0.109375) || (row[3] - 0.109375).abs() < 1e-15);
    assert!((row[4] - 0.125420).abs() < 5e-7);
    assert!((row[6] - 2.0 * (-1.8f64).exp()).abs() < 1e-15);
}
