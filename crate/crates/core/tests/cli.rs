use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn epkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epkit"))
        .args(args)
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write_matrix(dir: &Path, name: &str, k: usize, f: impl Fn(usize, usize) -> f64) -> String {
    let data: Vec<[f64; 2]> = (0..k * k).map(|n| [f(n / k, n % k), 0.0]).collect();
    let body = serde_json::json!({ "rows": k, "cols": k, "data": data });
    let path = dir.join(name);
    std::fs::write(&path, body.to_string()).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn partitions_of_eight() {
    let out = epkit(&["partitions", "--K", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["tool"], "epkit");
    assert_eq!(v["result"]["nontrivial"], 6);
    assert_eq!(v["result"]["partitions"].as_array().unwrap().len(), 7);
}

#[test]
fn bose_hubbard_ladder() {
    let out = epkit(&["bose-hubbard", "--K", "4", "--gamma", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let values: Vec<f64> = json(&out)["result"]["closed_form"]["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert_eq!(values, vec![-3.0, -1.0, 1.0, 3.0]);
}

#[test]
fn unperturbed_l2_is_all_zero() {
    let dir = TempDir::new().unwrap();
    let m = write_matrix(dir.path(), "v.json", 4, |i, j| (i + 2 * j) as f64 * 0.1);
    let out = epkit(&[
        "l2-solve",
        "--partition",
        "2,2",
        "--matrix",
        &m,
        "--lambda",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["result"]["complete"], true);
    let roots = v["result"]["refined"]["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 4);
    for r in roots {
        let eps = &r["eps"];
        assert_eq!(eps[0].as_f64(), Some(0.0));
        assert_eq!(eps[1].as_f64(), Some(0.0));
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let m = write_matrix(dir.path(), "v.json", 5, |i, j| {
        ((3 * i + j) % 7) as f64 / 7.0 - 0.4
    });
    let args = [
        "l1-solve",
        "--matrix",
        m.as_str(),
        "--lambda",
        "1e-3",
        "--refine",
    ];
    let a = epkit(&args);
    let b = epkit(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let search = [
        "classify",
        "--partition",
        "2,2",
        "--search",
        "--seed",
        "11",
        "--trials",
        "500",
    ];
    let a = epkit(&search);
    assert_eq!(a.stdout, epkit(&search).stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("p.json");
    let out = epkit(&["partitions", "--K", "6", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["result"]["nontrivial"], 3);
}

#[test]
fn sweep_csv_is_sorted() {
    let dir = TempDir::new().unwrap();
    let m = write_matrix(dir.path(), "v.json", 3, |i, j| {
        ((i * 5 + j * 3) % 4) as f64 - 1.5
    });
    let out = epkit(&[
        "sweep",
        "--matrix",
        &m,
        "--lambda-min",
        "1e-4",
        "--lambda-max",
        "1e-2",
        "--points",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("lambda,root_index,re,im,is_real"));
    let rows: Vec<(f64, usize)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f.len(), 5);
            (f[0].parse().unwrap(), f[1].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 15);
    assert!(rows
        .windows(2)
        .all(|w| w[0].0 < w[1].0 || (w[0].0 == w[1].0 && w[0].1 + 1 == w[1].1)));
}

#[test]
fn input_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    assert_eq!(epkit(&["partitions"]).status.code(), Some(2));
    assert_eq!(epkit(&["partitions", "--K", "1"]).status.code(), Some(2));
    assert_eq!(
        epkit(&["l1-solve", "--matrix", "/nonexistent.json", "--lambda", "1"])
            .status
            .code(),
        Some(2)
    );
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"rows":2,"cols":2,"data":[[1,0]]}"#).unwrap();
    let out = epkit(&[
        "l1-solve",
        "--matrix",
        bad.to_str().unwrap(),
        "--lambda",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(
        epkit(&["classify", "--partition", "2,2", "--search"])
            .status
            .code(),
        Some(2)
    );
    // Negative values parse; -0.5 is simply not an eigenvalue here.
    let m = write_matrix(dir.path(), "v.json", 4, |_, _| 1.0);
    let out = epkit(&["jordan", "--matrix", &m, "--eta-re", "-0.5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("eigenvalue"));
}

#[test]
fn unmet_expectation_exits_three() {
    let dir = TempDir::new().unwrap();
    let m = write_matrix(
        dir.path(),
        "j.json",
        4,
        |i, j| if i == j + 1 { 1.0 } else { 0.0 },
    );
    assert_eq!(
        epkit(&["jordan", "--matrix", &m, "--expect", "4"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        epkit(&["jordan", "--matrix", &m, "--expect", "2,2"])
            .status
            .code(),
        Some(3)
    );
}
