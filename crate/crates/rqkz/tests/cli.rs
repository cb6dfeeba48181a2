use std::path::PathBuf;
use std::process::{Command, Output};

use rqkz::dump::MatrixDump;
use rqkz_core::linalg::{identity, rel_diff};

fn rqkz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rqkz"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rqkz-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn default_suite_passes_with_schema() {
    let out = rqkz(&["suite"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let arr = v.as_array().unwrap();
    assert!(arr.len() > 100);
    for r in arr {
        for key in ["name", "params", "residual", "tolerance", "passed", "wall_ms"] {
            assert!(r.get(key).is_some(), "missing {key} in {r}");
        }
        assert_eq!(r["passed"], true);
        assert!(r["wall_ms"].is_null());
    }
    let names: Vec<&str> = arr.iter().map(|r| r["name"].as_str().unwrap()).collect();
    assert!(names.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn suite_output_is_byte_identical_across_runs_and_threads() {
    let (a, b) = (scratch("a.json"), scratch("b.json"));
    let args = |p: &PathBuf, t: &str| {
        rqkz(&[
            "suite",
            "--seed",
            "7",
            "--m",
            "2",
            "--threads",
            t,
            "--out",
            p.to_str().unwrap(),
        ])
    };
    assert_eq!(args(&a, "1").status.code(), Some(0));
    assert_eq!(args(&b, "3").status.code(), Some(0));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let c = rqkz(&["suite", "--seed", "8", "--m", "2"]);
    assert_ne!(std::fs::read(&a).unwrap(), c.stdout);
}

#[test]
fn exit_codes() {
    let root = rqkz(&["suite", "--q", "0,1"]);
    assert_eq!(root.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&root.stderr).contains("root of unity"));
    assert_eq!(rqkz(&["suite", "--q", "-1"]).status.code(), Some(2));
    assert_eq!(rqkz(&["suite", "--s0", "0", "--s1", "0"]).status.code(), Some(2));
    assert_eq!(rqkz(&["verify", "no_such_check"]).status.code(), Some(2));
    assert_eq!(rqkz(&["suite", "--m", "x"]).status.code(), Some(2));

    let tight = rqkz(&["verify", "unitarity", "--tol", "1e-30"]);
    assert_eq!(tight.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&tight.stdout).unwrap();
    assert!(v
        .as_array()
        .unwrap()
        .iter()
        .any(|r| r["residual"].as_f64().unwrap() > 0.0));
}

#[test]
fn verify_runs_one_check() {
    let out = rqkz(&["verify", "ybe", "--m", "2", "--samples", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.as_array().unwrap().iter().all(|r| r["name"] == "ybe"));
    let list = String::from_utf8(rqkz(&["verify", "list"]).stdout).unwrap();
    assert!(list.contains("theorem_general"));
}

#[test]
fn rmat_dump_round_trips_and_is_identity_at_coincidence() {
    let p = scratch("r.json");
    let out = rqkz(&[
        "rmat",
        "--m",
        "2",
        "--zeta1",
        "0.8,0.1",
        "--zeta2",
        "0.8,0.1",
        "--out",
        p.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let op = MatrixDump::from_json(&std::fs::read_to_string(&p).unwrap())
        .unwrap()
        .to_operator()
        .unwrap();
    assert_eq!(op.site_dims_out, vec![3, 3]);
    assert!(rel_diff(&op.data, &identity(9)) < 1e-12);
}

#[test]
fn scalars_table_at_one() {
    let out = rqkz(&["scalars", "--z", "1", "--l", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for row in v.as_array().unwrap() {
        assert_eq!(row["kappa"][0].as_f64().unwrap(), 1.0);
    }
    assert_eq!(v[0]["d"][0].as_f64().unwrap(), -1.0);
    assert_eq!(v[1]["family"], "sl3/fund");
}
