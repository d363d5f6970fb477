use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn poisdiff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_poisdiff"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    (
        header,
        lines
            .map(|l| l.split(',').map(String::from).collect())
            .collect(),
    )
}

#[test]
fn list_models_prints_six_entries() {
    let out = poisdiff(&["list-models"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let models = v.as_array().unwrap();
    assert_eq!(models.len(), 6);
    for m in models {
        assert!(m["id"].is_string() && m["params"].is_array(), "{m}");
    }
}

#[test]
fn invalid_config_exits_with_2_and_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.json",
        "{\n  \"schema_version\": 1,\n  \"kind\": \"lln-rate\",\n  \"model\": { \"id\": \"telegraph\" },\n  \"n\": [100, 50],\n  \"replications\": 4,\n  \"seed\": 1\n}\n",
    );
    let out = poisdiff(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 5"), "{err}");

    let out = poisdiff(&["run", &dir.path().join("missing.json").to_string_lossy()]);
    assert_eq!(out.status.code(), Some(2));

    let hot = write(
        dir.path(),
        "unstable.json",
        r#"{"schema_version": 1, "kind": "hawkes-limit", "model": {"id": "hawkes", "params": {"alpha": 2.0, "beta": 1.0}}, "n": [10], "replications": 4, "seed": 1}"#,
    );
    assert_eq!(poisdiff(&["run", &hot]).status.code(), Some(2));
}

#[test]
fn model_domain_errors_exit_with_3() {
    // mm-infty with a tiny state cap leaves its box during the run
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "escape.json",
        r#"{"schema_version": 1, "kind": "lln-rate", "model": {"id": "mm-infty", "params": {"lambda": 5.0, "lambda0": 0.5, "x_max": 0.6}},
            "n": [100], "replications": 2, "horizon": 2.0, "seed": 1}"#,
    );
    let out = poisdiff(&[
        "run",
        &cfg,
        "--out",
        &dir.path().join("o").to_string_lossy(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn fclt_summary_has_per_coordinate_ks_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "fclt.json",
        r#"{"schema_version": 1, "kind": "fclt-marginal", "model": {"id": "sir"}, "n": [100, 400], "replications": 30, "seed": 5}"#,
    );
    let out_dir = dir.path().join("out");
    let out = poisdiff(&["run", &cfg, "--out", &out_dir.to_string_lossy()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (header, rows) = csv(&out_dir.join("summary.csv"));
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .unwrap_or_else(|| panic!("no column {name}"))
    };
    let (coord, p) = (col("coord"), col("ks_p_value"));
    assert_eq!(rows.len(), 4);
    let mut coords: Vec<&str> = rows.iter().map(|r| r[coord].as_str()).collect();
    coords.sort();
    assert_eq!(coords, ["0", "0", "1", "1"]);
    for r in &rows {
        let v: f64 = r[p].parse().unwrap();
        assert!((0.0..=1.0).contains(&v));
    }
    let manifest: Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 5);
    assert_eq!(manifest["kind"], "fclt-marginal");
}

#[test]
fn poisson_max_run_reports_no_lambert_violations() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "pmb.json",
        r#"{"schema_version": 1, "kind": "poisson-max-bound", "n": [10, 100, 1000], "nu": [0.5, 2.0], "replications": 100, "seed": 3}"#,
    );
    let out_dir = dir.path().join("out");
    assert!(
        poisdiff(&["run", &cfg, "--out", &out_dir.to_string_lossy()])
            .status
            .success()
    );
    let (header, rows) = csv(&out_dir.join("summary.csv"));
    let v = header.iter().position(|h| h == "violation").unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r[v] == "false"));
}

#[test]
fn outputs_do_not_depend_on_workers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "lln.json",
        r#"{"schema_version": 1, "kind": "lln-rate", "model": {"id": "telegraph"}, "n": [100, 10000], "replications": 10, "seed": 1}"#,
    );
    let dirs: Vec<_> = ["1", "4"]
        .iter()
        .map(|w| {
            let d = dir.path().join(format!("w{w}"));
            let out = poisdiff(&["run", &cfg, "--workers", w, "--out", &d.to_string_lossy()]);
            assert!(out.status.success());
            d
        })
        .collect();
    let mut names: Vec<_> = fs::read_dir(&dirs[0])
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert!(names.iter().any(|n| n == "summary.csv") && names.iter().any(|n| n == "manifest.json"));
    for name in names {
        assert_eq!(
            fs::read(dirs[0].join(&name)).unwrap(),
            fs::read(dirs[1].join(&name)).unwrap(),
            "{name:?}"
        );
    }
    // a seed override changes the numbers
    let d = dir.path().join("seed2");
    assert!(
        poisdiff(&["run", &cfg, "--seed", "2", "--out", &d.to_string_lossy()])
            .status
            .success()
    );
    assert_ne!(
        fs::read(dirs[0].join("summary.csv")).unwrap(),
        fs::read(d.join("summary.csv")).unwrap()
    );
}
