use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn msolab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msolab"))
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &TempDir, name: &str, value: &Value) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, value.to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

fn build_dtto(symbol: &str, m: &str) -> Value {
    let out = msolab(&[
        "build", "dtto", "--theta", "z^2", "--symbol", symbol, "--M", m,
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    stdout_json(&out)
}

fn entry(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

#[test]
fn build_tto_example() {
    let out = msolab(&[
        "build",
        "tto",
        "--theta",
        "z^2",
        "--alpha",
        "z^2",
        "--symbol",
        r#"{"coeffs": [[1, 1, 0]]}"#,
    ]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(
        v["entries"],
        json!([[[0.0, 0.0], [0.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]])
    );
}

#[test]
fn build_dtto_constant_symbol_is_identity() {
    let v = build_dtto(r#"{"coeffs": [[0, 1, 0]]}"#, "8");
    for (name, diagonal) in [
        ("That", 1.0),
        ("TCheck", 1.0),
        ("GammaHat", 0.0),
        ("GammaCheck", 0.0),
    ] {
        let rows = v["blocks"][name].as_array().unwrap();
        assert_eq!(rows.len(), 9);
        for (i, row) in rows.iter().enumerate() {
            for (j, x) in row.as_array().unwrap().iter().enumerate() {
                let expected = if i == j { diagonal } else { 0.0 };
                assert_eq!(entry(x), (expected, 0.0), "{name}[{i}][{j}]");
            }
        }
    }
}

#[test]
fn bad_zero_is_an_input_error() {
    let out = msolab(&["build", "dtto", "--theta", r#"{"zeros": [[1.2, 0]]}"#]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("zero outside open disk"));
}

#[test]
fn guard_band_is_an_input_error() {
    let out = msolab(&[
        "build",
        "dtto",
        "--theta",
        "z^2",
        "--symbol",
        r#"{"coeffs": [[3, 1, 0]]}"#,
        "--M",
        "6",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn check_built_operator_passes() {
    let dir = TempDir::new().unwrap();
    let file = write(
        &dir,
        "d.json",
        &build_dtto(r#"{"coeffs": [[-1, 2, 0], [1, 1, 0]]}"#, "10"),
    );
    let out = msolab(&["check", &file, "--checks", "adtto,blocks,shift"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 9);
    assert!(reports.iter().all(|r| r["pass"] == json!(true)));
    assert_eq!(reports[0]["condition"], "th8.12-1");
}

#[test]
fn rank_one_perturbation_fails_first_condition() {
    let dir = TempDir::new().unwrap();
    let mut d = build_dtto(r#"{"coeffs": [[0, 1, 0], [1, 0.5, 0]]}"#, "10");
    // θ⊗θ adds 1 to the (0, 0) entry of That
    let (re, im) = entry(&d["blocks"]["That"][0][0]);
    d["blocks"]["That"][0][0] = json!([re + 1.0, im]);
    let file = write(&dir, "p.json", &d);
    let out = msolab(&["check", &file, "--checks", "adtto"]);
    assert_eq!(code(&out), 1);
    let v = stdout_json(&out);
    let first = &v["reports"][0];
    assert_eq!(first["condition"], "th8.12-1");
    assert!((first["defect"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(!first["witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn analytic_check_on_coanalytic_symbol_fails_with_witness() {
    let dir = TempDir::new().unwrap();
    let file = write(
        &dir,
        "d.json",
        &build_dtto(r#"{"coeffs": [[-1, 1, 0]]}"#, "8"),
    );
    let out = msolab(&["check", &file, "--checks", "analytic"]);
    assert_eq!(code(&out), 1);
    let w = &stdout_json(&out)["reports"][0]["witnesses"][0];
    assert!((w["deviation"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn shift_check_on_model_space_operator() {
    let dir = TempDir::new().unwrap();
    let out = msolab(&[
        "build",
        "tto",
        "--theta",
        "z^3",
        "--alpha",
        "z^2",
        "--symbol",
        r#"{"coeffs": [[-1, 1, 0], [1, 0, 2]]}"#,
    ]);
    let file = write(&dir, "a.json", &stdout_json(&out));
    assert_eq!(code(&msolab(&["check", &file, "--checks", "shift"])), 0);
    assert_eq!(code(&msolab(&["check", &file, "--checks", "adtto"])), 2);
}

#[test]
fn recover_example_and_identity() {
    let dir = TempDir::new().unwrap();
    let file = write(
        &dir,
        "d.json",
        &build_dtto(r#"{"coeffs": [[-1, 2, 0], [1, 1, 0]]}"#, "10"),
    );
    for method in ["boundary", "zbar"] {
        let out = msolab(&["recover", &file, "--method", method]);
        assert_eq!(code(&out), 0);
        let v = stdout_json(&out);
        assert_eq!(
            v["symbol"],
            json!({"coeffs": [[-1, 2.0, 0.0], [1, 1.0, 0.0]]})
        );
        assert!(v["residual"].as_f64().unwrap() <= 1e-11);
    }
    let id = write(
        &dir,
        "id.json",
        &build_dtto(r#"{"coeffs": [[0, 1, 0]]}"#, "8"),
    );
    let v = stdout_json(&msolab(&["recover", &id]));
    assert_eq!(v["symbol"], json!({"coeffs": [[0, 1.0, 0.0]]}));
    assert_eq!(v["residual"], json!(0.0));
}

#[test]
fn recover_random_matrix_reports_large_residual() {
    let dir = TempDir::new().unwrap();
    let mut d = build_dtto(r#"{"coeffs": [[0, 1, 0]]}"#, "8");
    let mut state = 7u64;
    for name in ["That", "GammaCheck", "GammaHat", "TCheck"] {
        let block: Vec<Vec<[f64; 2]>> = (0..9)
            .map(|_| {
                (0..9)
                    .map(|_| {
                        state = state
                            .wrapping_mul(6364136223846793005)
                            .wrapping_add(1442695040888963407);
                        [(state >> 11) as f64 / (1u64 << 53) as f64 - 0.5, 0.0]
                    })
                    .collect()
            })
            .collect();
        d["blocks"][name] = json!(block);
    }
    let file = write(&dir, "r.json", &d);
    let out = msolab(&["recover", &file]);
    assert_eq!(code(&out), 1);
    assert!(stdout_json(&out)["residual"].as_f64().unwrap() > 1e-3);
}

#[test]
fn malformed_inputs_exit_two() {
    let dir = TempDir::new().unwrap();
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{not json").unwrap();
    let junk = junk.to_str().unwrap();
    assert_eq!(code(&msolab(&["check", junk])), 2);
    assert_eq!(code(&msolab(&["recover", "/nonexistent/file.json"])), 2);
    let other = write(&dir, "o.json", &json!({"hello": 1}));
    assert_eq!(code(&msolab(&["check", &other])), 2);
    let dense = write(&dir, "t.json", &stdout_json(&msolab(&["build", "tto"])));
    assert_eq!(code(&msolab(&["recover", &dense])), 2);
    let d = write(
        &dir,
        "d.json",
        &build_dtto(r#"{"coeffs": [[0, 1, 0]]}"#, "8"),
    );
    assert_eq!(code(&msolab(&["check", &d, "--tol", "-1"])), 2);
    assert_eq!(code(&msolab(&["suite", "bogus"])), 2);
    assert_eq!(code(&msolab(&["build", "dtto", "--symbol", "[1, 2]"])), 2);
}

#[test]
fn convergence_suite_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = msolab(&[
            "suite",
            "convergence",
            "--seed",
            "5",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let v: Value = serde_json::from_slice(&std::fs::read(Path::new(&a)).unwrap()).unwrap();
    assert_eq!(v["suite"], "convergence");
    assert_eq!(v["criteria"][0]["series"].as_array().unwrap().len(), 5);
}

#[test]
fn acceptance_suite_passes() {
    let out = msolab(&["suite", "acceptance"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 10);
    assert_eq!(String::from_utf8_lossy(&out.stderr).lines().count(), 10);
}
