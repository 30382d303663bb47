use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::json;

fn hagkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hagkit")).args(args).env_remove("HAGKIT_WORKERS").output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, value: &serde_json::Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, value.to_string()).unwrap();
    path
}

fn hermite_1d(eps: f64) -> serde_json::Value {
    json!({"epsilon": eps, "q": [0.0], "p": [0.0],
           "Q": {"re": [[1.0]], "im": [[0.0]]}, "P": {"re": [[0.0]], "im": [[1.0]]}})
}

/// A squeezed, shifted one-dimensional packet: Q = 1.3 + 0.4i, P = (0.2 + i)/conj(Q).
fn squeezed_1d() -> serde_json::Value {
    let (a, b) = (1.3f64, 0.4f64);
    // (0.2 + i)/(a − ib) = (0.2 + i)(a + ib)/(a² + b²)
    let n = a * a + b * b;
    let (pr, pi) = ((0.2 * a - b) / n, (a + 0.2 * b) / n);
    json!({"epsilon": 0.3, "q": [0.4], "p": [-0.7],
           "Q": {"re": [[a]], "im": [[b]]}, "P": {"re": [[pr]], "im": [[pi]]}})
}

fn hermite_d(d: usize, eps: f64) -> serde_json::Value {
    let id: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let zero = vec![vec![0.0; d]; d];
    json!({"epsilon": eps, "q": vec![0.0; d], "p": vec![0.0; d],
           "Q": {"re": id, "im": zero}, "P": {"re": zero, "im": id}})
}

/// Data rows of a CSV produced by the tool.
fn rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.json", &hermite_1d(0.5));
    let o = hagkit(&["validate", good.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    // P = Q = 1: Q*P − P*Q − 2i has modulus 2.
    let bad = write(dir.path(), "bad.json", &json!({"epsilon": 1.0, "q": [0.0], "p": [0.0],
        "Q": {"re": [[1.0]], "im": [[0.0]]}, "P": {"re": [[1.0]], "im": [[0.0]]}}));
    let o = hagkit(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("2.000e0"), "{}", stdout(&o));

    let malformed = dir.path().join("malformed.json");
    std::fs::write(&malformed, "{\"epsilon\": 1.0, \"q\": [0.0]").unwrap();
    assert_eq!(code(&hagkit(&["validate", malformed.to_str().unwrap()])), 3);

    let missing = dir.path().join("nope.json");
    assert_eq!(code(&hagkit(&["validate", missing.to_str().unwrap()])), 3);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&hagkit(&["frobnicate"])), 1);
    assert_eq!(code(&hagkit(&["--help"])), 0);
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "p.json", &hermite_1d(1.0));
    let f = f.to_str().unwrap();
    assert_eq!(code(&hagkit(&["eval", f, "--k", "0,1", "--grid", "-1:1:5"])), 1);
    assert_eq!(code(&hagkit(&["eval", f, "--k", "0", "--grid", "1:-1:5"])), 1);
    assert_eq!(code(&hagkit(&["eval", f, "--k", "0"])), 1);
    assert_eq!(code(&hagkit(&["--workers", "0", "eval", f, "--k", "0", "--grid", "-1:1:5"])), 1);
    let o = Command::new(env!("CARGO_BIN_EXE_hagkit"))
        .args(["eval", f, "--k", "0", "--grid", "-1:1:5"])
        .env("HAGKIT_WORKERS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
}

#[test]
fn wigner_closed_matches_recurrence() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "p.json", &squeezed_1d());
    let f = f.to_str().unwrap();
    let run = |m: &str| {
        let o = hagkit(&["wigner", f, "--k", "3", "--l", "5", "--method", m, "--grid", "-1.5:2:9,-2.5:1:9"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        rows(&stdout(&o))
    };
    let (a, b) = (run("closed"), run("recurrence"));
    assert_eq!(a.len(), 81);
    // Relative to the peak scale (πε)^{-1} of the Wigner function.
    let scale = 1.0 / (std::f64::consts::PI * 0.3);
    for (ra, rb) in a.iter().zip(&b) {
        assert_eq!(ra[..2], rb[..2]);
        assert!((ra[2] - rb[2]).abs() <= 1e-12 * scale && (ra[3] - rb[3]).abs() <= 1e-12 * scale);
    }
}

#[test]
fn ground_state_wigner_peak() {
    let dir = tempfile::tempdir().unwrap();
    for d in [1usize, 2, 3] {
        let eps = 0.25;
        let mut params = hermite_d(d, eps);
        params["q"] = json!(vec![0.3; d]);
        params["p"] = json!(vec![-0.2; d]);
        let f = write(dir.path(), &format!("p{d}.json"), &params);
        let points = dir.path().join(format!("pts{d}.csv"));
        let row: Vec<String> = [vec!["0.3"; d], vec!["-0.2"; d]].concat().iter().map(|s| s.to_string()).collect();
        std::fs::write(&points, row.join(",") + "\n").unwrap();
        let zero = vec!["0"; d].join(",");
        let o = hagkit(&["wigner", f.to_str().unwrap(), "--k", &zero, "--l", &zero, "--points", points.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let v = rows(&stdout(&o))[0][2 * d];
        let expect = (std::f64::consts::PI * eps).powi(-(d as i32));
        assert!((v - expect).abs() <= 1e-13 * expect, "d={d}: {v} vs {expect}");
    }
}

#[test]
fn quadrature_refused_above_two_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "p.json", &hermite_d(3, 1.0));
    let f = f.to_str().unwrap();
    let grid = "-1:1:2,-1:1:2,-1:1:2,-1:1:2,-1:1:2,-1:1:2";
    assert_eq!(code(&hagkit(&["fbi", f, "--k", "0,0,0", "--method", "quadrature", "--grid", grid])), 1);
    assert_eq!(code(&hagkit(&["wigner", f, "--k", "0,0,0", "--l", "0,0,0", "--method", "quadrature", "--grid", grid])), 1);
    assert_eq!(code(&hagkit(&["fbi", f, "--k", "1,0,0", "--grid", grid])), 0);
}

#[test]
fn fbi_and_husimi_agree_with_quadrature() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "p.json", &squeezed_1d());
    let f = f.to_str().unwrap();
    for cmd in ["fbi", "husimi"] {
        let run = |m: &str| {
            let o = hagkit(&[cmd, f, "--k", "2", "--method", m, "--grid", "-1:1.5:5,-2:0.5:5"]);
            assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
            rows(&stdout(&o))
        };
        let (a, b) = (run("closed"), run("quadrature"));
        let peak = a.iter().flat_map(|r| r[2..].iter()).fold(0.0f64, |m, v| m.max(v.abs()));
        for (ra, rb) in a.iter().zip(&b) {
            for (x, y) in ra[2..].iter().zip(&rb[2..]) {
                assert!((x - y).abs() <= 1e-10 * peak, "{cmd}: {x} vs {y}");
            }
        }
    }
}

#[test]
fn hermite_product_projects_to_unit_coefficient() {
    let dir = tempfile::tempdir().unwrap();
    let mut params = hermite_d(2, 0.5);
    params["q"] = json!([0.2, -0.1]);
    params["p"] = json!([0.5, 0.3]);
    let f = write(dir.path(), "p.json", &params);
    let out = dir.path().join("c.json");
    let o = hagkit(&["project", f.to_str().unwrap(), "--function", "builtin:hermite-product(2,1)", "--K", "8", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let c: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let idx = c["indices"].as_array().unwrap();
    for (i, k) in idx.iter().enumerate() {
        let (re, im) = (c["re"][i].as_f64().unwrap(), c["im"][i].as_f64().unwrap());
        let target = if k == &json!([2, 1]) { 1.0 } else { 0.0 };
        assert!((re - target).abs() <= 1e-10 && im.abs() <= 1e-10, "{k}: {re} {im}");
    }
    assert!(c["l2_residual"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn project_then_wignerfun_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "p.json", &hermite_1d(0.5));
    let coeffs = dir.path().join("c.json");
    let o = hagkit(&["project", f.to_str().unwrap(), "--function", "builtin:hermite-product(3)", "--K", "6", "--out", coeffs.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let grid = "-1:1:7,-1:1:7";
    let o = hagkit(&["wignerfun", f.to_str().unwrap(), "--coeffs", coeffs.to_str().unwrap(), "--grid", grid]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let fun = rows(&stdout(&o));
    let o = hagkit(&["wigner", f.to_str().unwrap(), "--k", "3", "--l", "3", "--grid", grid]);
    let direct = rows(&stdout(&o));
    for (a, b) in fun.iter().zip(&direct) {
        assert!((a[2] - b[2]).abs() <= 1e-10, "{} vs {}", a[2], b[2]);
    }

    let mut other = hermite_1d(0.5);
    other["q"] = json!([0.1]);
    let g = write(dir.path(), "other.json", &other);
    let o = hagkit(&["wignerfun", g.to_str().unwrap(), "--coeffs", coeffs.to_str().unwrap(), "--grid", grid]);
    assert_eq!(code(&o), 1);
}

#[test]
fn samples_projection_matches_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "p.json", &hermite_1d(0.5));
    // φ_1 for Q = 1, P = i, ε = ½: (2/π)^{1/4}·2x·e^{−x²} sampled on a fine grid.
    let n = 401;
    let mut text = String::from("x1,re,im\n");
    for i in 0..n {
        let x = -8.0 + 16.0 * i as f64 / (n - 1) as f64;
        let v = (2.0 / std::f64::consts::PI).powf(0.25) * 2.0 * x * (-x * x).exp();
        text += &format!("{x:.17e},{v:.17e},0\n");
    }
    let samples = dir.path().join("s.csv");
    std::fs::write(&samples, text).unwrap();
    let out = dir.path().join("c.json");
    let o = hagkit(&["project", f.to_str().unwrap(), "--function", samples.to_str().unwrap(), "--K", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let c: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    for (i, k) in c["indices"].as_array().unwrap().iter().enumerate() {
        let target = if k == &json!([1]) { 1.0 } else { 0.0 };
        let re = c["re"][i].as_f64().unwrap();
        assert!((re - target).abs() <= 1e-10, "{k}: {re}");
    }
}

#[test]
fn project_study_prints_decreasing_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "p.json", &hermite_1d(0.1));
    let o = hagkit(&["project", f.to_str().unwrap(), "--function", "builtin:shifted-gaussian(1,0,0.316227766016838)", "--K", "32", "--study"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&stdout(&o));
    assert_eq!(r.iter().map(|row| row[0]).collect::<Vec<_>>(), vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0]);
    for w in r.windows(2) {
        assert!(w[1][2] < w[0][2], "residual grew: {:?}", r);
    }
}

#[test]
fn propagate_harmonic_period() {
    let dir = tempfile::tempdir().unwrap();
    let mut params = hermite_1d(1.0);
    params["q"] = json!([1.0]);
    let f = write(dir.path(), "p.json", &params);
    let out = dir.path().join("traj.csv");
    let t = format!("{}", 2.0 * std::f64::consts::PI);
    let o = hagkit(&["propagate", f.to_str().unwrap(), "--potential", "harmonic", "--T", &t, "--dt", &format!("{}", 2.0 * std::f64::consts::PI / 6000.0), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(r.len(), 6001);
    let last = r.last().unwrap();
    assert!((last[1] - 1.0).abs() <= 4e-6 && last[2].abs() <= 4e-6, "{last:?}");
    assert!(r.iter().all(|row| *row.last().unwrap() <= 1e-8));
}

#[test]
fn propagate_failure_writes_partial_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let mut params = hermite_1d(1.0);
    params["q"] = json!([1.0]);
    let f = write(dir.path(), "p.json", &params);
    let out = dir.path().join("traj.csv");
    let o = hagkit(&["propagate", f.to_str().unwrap(), "--potential", "quartic", "--T", "1", "--dt", "0.01", "--drift-tol", "1e-17", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("stopped early"));
    assert!(!rows(&text).is_empty());

    assert_eq!(code(&hagkit(&["propagate", f.to_str().unwrap(), "--potential", "harmonic", "--T", "1", "--dt", "0.3"])), 1);
}

#[test]
fn propagate_potential_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "p.json", &hermite_1d(1.0));
    let pot = write(dir.path(), "v.json", &json!({"hessian": [[1.0]]}));
    let o = hagkit(&["propagate", f.to_str().unwrap(), "--potential", pot.to_str().unwrap(), "--T", "1", "--dt", "0.01"]);
    let h = hagkit(&["propagate", f.to_str().unwrap(), "--potential", "harmonic", "--T", "1", "--dt", "0.01"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(rows(&stdout(&o)), rows(&stdout(&h)));
    let bad = write(dir.path(), "w.json", &json!({"hessian": [[1.0, 0.0]]}));
    assert_eq!(code(&hagkit(&["propagate", f.to_str().unwrap(), "--potential", bad.to_str().unwrap(), "--T", "1", "--dt", "0.01"])), 3);
}

#[test]
fn output_independent_of_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "p.json", &squeezed_1d());
    let f = f.to_str().unwrap();
    let one = hagkit(&["--workers", "1", "wigner", f, "--k", "4", "--l", "2", "--grid", "-2:2:31,-2:2:31"]);
    let many = hagkit(&["--workers", "4", "wigner", f, "--k", "4", "--l", "2", "--grid", "-2:2:31,-2:2:31"]);
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn bench_reports_every_method() {
    let o = hagkit(&["bench", "--d", "1", "--K", "8", "--npoints", "50"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    for m in ["recurrence", "closed", "quadrature"] {
        assert!(s.contains(m), "{s}");
    }
    assert_eq!(code(&hagkit(&["bench", "--d", "3", "--K", "4", "--npoints", "5"])), 1);
}
