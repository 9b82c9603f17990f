use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_poissonlin"));
    c.env_remove("POISSONLIN_THREADS");
    c
}

fn example() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/thompson_example.json")
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().expect("binary runs")
}

fn report(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

fn checks_below(r: &Value, bound: f64) -> bool {
    r["checks"].as_array().unwrap().iter().all(|c| c["value"].as_f64().unwrap() <= bound)
}

#[test]
fn thompson_bundled_instance() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["thompson", "--in", example().to_str().unwrap(), "--out", "t.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(dir.path(), "t.json");
    assert_eq!(r["verdict"], "feasible");
    assert!(r["residual"].as_f64().unwrap() <= 1e-6);
    assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(r["config"]["seed"], 0);
    let witnesses = r["witnesses"].as_array().unwrap();
    assert_eq!(witnesses.len(), 3);
    assert_eq!(witnesses[0][0][0].as_array().unwrap().len(), 2);
    // only the report remains in the directory
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn multiplicative_report_labels_both_singular_value_conventions() {
    let dir = tempfile::tempdir().unwrap();
    let ex = example();
    let args = ["thompson", "--in", ex.to_str().unwrap(), "--mode", "multiplicative-complex", "--out", "t.json"];
    assert_eq!(run(&args, dir.path()).status.code(), Some(0));
    let labels = &report(dir.path(), "t.json")["labels"];
    let sq = labels["squared_singular_values"][0][0].as_f64().unwrap();
    let conv = labels["conventional_singular_values"][0][0].as_f64().unwrap();
    assert!((sq - 1f64.exp()).abs() < 1e-15);
    assert!((conv - 0.5f64.exp()).abs() < 1e-15);
}

#[test]
fn verify_identities_example() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify-identities", "--seed", "7", "--samples", "100", "--out", "v.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r = report(dir.path(), "v.json");
    let algebraic: Vec<&Value> =
        r["checks"].as_array().unwrap().iter().filter(|c| c["name"] != "S-matrix divergence").collect();
    assert_eq!(algebraic.len(), 4);
    assert!(algebraic.iter().all(|c| c["value"].as_f64().unwrap() <= 1e-9));
}

#[test]
fn duflo_test_example_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "duflo-test", "--r", "2", "--lambda1", "1,-1", "--lambda2", "1,-1", "--samples", "1000000", "--out", "d.json",
        "--csv", "d.csv",
    ];
    let out = run(&args, dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r = report(dir.path(), "d.json");
    assert!(r["l1_distance"].as_f64().unwrap() <= 0.05);
    let csv = std::fs::read_to_string(dir.path().join("d.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "bin_center_1,bin_center_2,density_additive_reweighted,density_multiplicative"
    );
    let mut mass = [0.0, 0.0];
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 4);
        for f in &fields {
            // 17 significant digits round-trip
            let x: f64 = f.parse().unwrap();
            assert_eq!(format!("{x:.16e}"), *f);
        }
        mass[0] += fields[2].parse::<f64>().unwrap();
        mass[1] += fields[3].parse::<f64>().unwrap();
    }
    assert!((mass[0] - 1.0).abs() < 1e-9 && (mass[1] - 1.0).abs() < 1e-9);
}

#[test]
fn reports_are_byte_identical_across_thread_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ex = example();
    let cases: [&[&str]; 3] = [
        &["duflo-test", "--samples", "100000", "--bins", "50", "--seed", "3", "--out", "r.json", "--csv", "r.csv"],
        &["thompson", "--in", ex.to_str().unwrap(), "--mode", "multiplicative-real", "--seed", "5", "--out", "r.json"],
        &["decompose", "--samples", "50", "--seed", "9", "--out", "r.json"],
    ];
    for args in cases {
        let one = bin().args(args).current_dir(a.path()).env("POISSONLIN_THREADS", "1").output().unwrap();
        let many = bin().args(args).current_dir(b.path()).env("POISSONLIN_THREADS", "4").output().unwrap();
        assert_eq!(one.status.code(), Some(0));
        assert_eq!(many.status.code(), Some(0));
        for name in ["r.json", "r.csv"] {
            let (pa, pb) = (a.path().join(name), b.path().join(name));
            if pa.exists() {
                assert_eq!(std::fs::read(pa).unwrap(), std::fs::read(pb).unwrap(), "{args:?} {name}");
            }
        }
    }
}

#[test]
fn input_errors_exit_with_status_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{\"r\": 2,\n\"n\": }").unwrap();
    let out = run(&["thompson", "--in", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    std::fs::write(
        dir.path().join("extra.json"),
        r#"{"r": 1, "n": 2, "spectra": [[1], [-1]], "mode": "additive-complex", "tolerance": 1}"#,
    )
    .unwrap();
    let out = run(&["thompson", "--in", "extra.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tolerance"));

    std::fs::write(dir.path().join("short.json"), r#"{"r": 2, "n": 2, "spectra": [[1, 0], [0]], "mode": "additive-real"}"#)
        .unwrap();
    let out = run(&["thompson", "--in", "short.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("spectra[1]"));

    assert_eq!(run(&["decompose", "--tol", "-1"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["duflo-test", "--samples", "10"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["thompson"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"], dir.path()).status.code(), Some(2));
    let out = bin().args(["decompose", "--samples", "2"]).env("POISSONLIN_THREADS", "many").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verification_failure_exits_with_status_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["decompose", "--samples", "20", "--tol", "1e-300", "--out", "r.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("factorization l k = g"), "{stderr}");
    assert_eq!(report(dir.path(), "r.json")["passed"], false);
}

#[test]
fn twisted_and_infeasible_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("weyl.json"),
        r#"{"r": 2, "n": 2, "spectra": [[3, -1], [0.5, -2.5]], "mode": "additive-complex"}"#,
    )
    .unwrap();
    let out = run(&["thompson", "--in", "weyl.json", "--out", "w.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r = report(dir.path(), "w.json");
    assert_eq!(r["verdict"], "infeasible-certified");
    assert!(r["certificate"]["kind"].is_string());

    std::fs::write(
        dir.path().join("tw.json"),
        r#"{"r": 2, "n": 2, "spectra": [[1, -1], [1, -1]], "mode": "twisted-additive"}"#,
    )
    .unwrap();
    let out = run(&["thompson", "--in", "tw.json", "--out", "t.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(dir.path(), "t.json")["verdict"], "feasible");
}

#[test]
fn smoke_all_commands() {
    let dir = tempfile::tempdir().unwrap();
    let ex = example();
    let cases: [&[&str]; 6] = [
        &["decompose", "--samples", "200", "--r", "4"],
        &["linearize", "--samples", "2"],
        &["volume-check", "--samples", "3", "--r", "3"],
        &["transfer", "--samples", "20", "--r", "3", "--n", "4"],
        &["transfer", "--in", ex.to_str().unwrap()],
        &["duflo-test", "--r", "1", "--lambda1", "0.5", "--lambda2", "-2", "--samples", "100000"],
    ];
    for args in cases {
        let out = run(args, dir.path());
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let r: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(r["passed"], true);
        assert!(checks_below(&r, 1e-5), "{args:?}");
    }
    let m = r#"{"matrix": [[[2, 0], [0, 1]], [[1, 0], [1, 0]]]}"#;
    std::fs::write(dir.path().join("g.json"), m).unwrap();
    let out = run(&["decompose", "--in", "g.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["l"][0][1], serde_json::json!([0.0, 0.0]));
}
