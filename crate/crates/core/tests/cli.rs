//! End-to-end runs of the `epsilon-star` binary: exit codes, fault injection
//! and the artifacts of each subcommand.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_epsilon-star");

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(rel)
}

fn run(args: &[&str], out_dir: &Path) -> Output {
    Command::new(BIN)
        .args(args)
        .env("EPSILON_STAR_OUT_DIR", out_dir)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn small_losses(dir: &Path, name: &str, values: &[f64]) -> PathBuf {
    let p = dir.join(name);
    epsilon_star::io::write_loss_file(&p, values).unwrap();
    p
}

#[test]
fn identical_files_audit_to_zero() {
    let dir = tempfile::tempdir().unwrap();
    let f = data("normal_sample.csv");
    let o = run(&["audit", "--train", s(&f), "--pop", s(&f)], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("audit.json")).unwrap()).unwrap();
    assert_eq!(report["result"]["epsilon_star"].as_f64(), Some(0.0));
    assert_eq!(report["schema"], "epsilon-star.audit/1");
    assert!(report["provenance"]["config"].is_object());
}

#[test]
fn every_method_runs_and_writes_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let (tr, po) = (data("landscape/s04_train.csv"), data("landscape/s04_pop.csv"));
    for m in ["parametric", "ecdf", "discrete"] {
        let out = dir.path().join(format!("{m}.json"));
        let o = run(
            &["audit", "--train", s(&tr), "--pop", s(&po), "--method", m, "--grid-size", "20000", "--out", s(&out)],
            dir.path(),
        );
        assert_eq!(code(&o), 0, "{m}: {}", String::from_utf8_lossy(&o.stderr));
        let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(v["result"]["method"], m);
        let printed: f64 = String::from_utf8_lossy(&o.stdout).trim().parse().unwrap();
        assert_eq!(Some(printed), v["result"]["epsilon_star"].as_f64());
    }
}

#[test]
fn input_faults_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let good = data("normal_sample.csv");
    let nan = dir.path().join("nan.csv");
    std::fs::write(&nan, "loss\n0.5\nNaN\n0.7\n").unwrap();
    let inf = dir.path().join("inf.csv");
    std::fs::write(&inf, "loss\n0.5\ninf\n").unwrap();
    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "").unwrap();
    let header_only = dir.path().join("header.csv");
    std::fs::write(&header_only, "loss\n").unwrap();
    let missing = dir.path().join("missing.csv");

    for bad in [&nan, &inf, &empty, &header_only, &missing] {
        for (tr, po) in [(bad, &good), (&good, bad)] {
            let o = run(&["audit", "--train", s(tr), "--pop", s(po)], dir.path());
            assert_eq!(code(&o), 2, "{}: {}", bad.display(), String::from_utf8_lossy(&o.stderr));
            assert!(!o.stderr.is_empty());
        }
    }
    for args in [
        vec!["audit", "--train", s(&good), "--pop", s(&good), "--delta", "1.5"],
        vec!["audit", "--train", s(&good), "--pop", s(&good), "--delta", "-0.1"],
        vec!["audit", "--train", s(&good), "--pop", s(&good), "--delta", "lots"],
        vec!["audit", "--train", s(&good), "--pop", s(&good), "--predictions"],
        vec!["audit", "--train", s(&good)],
        vec!["frobnicate"],
        vec!["landscape", "--manifest", s(&data("landscape/manifest.json")), "--format", "png"],
        vec!["ksfit", "--losses", s(&good), "--components", "0..3"],
    ] {
        let o = run(&args, dir.path());
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert!(!dir.path().join("audit.json").exists());
}

#[test]
fn nan_row_error_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let nan = dir.path().join("nan.csv");
    std::fs::write(&nan, "loss\n0.5\nNaN\n").unwrap();
    let o = run(&["audit", "--train", s(&nan), "--pop", s(&nan)], dir.path());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("nan.csv:3:"), "{err}");
}

#[test]
fn numeric_faults_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    // constant losses leave nothing to normalize
    let flat = small_losses(dir.path(), "flat.csv", &[2.0; 10]);
    let o = run(&["audit", "--train", s(&flat), "--pop", s(&flat)], dir.path());
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    // fully separated samples leave no ecdf pair inside the clamp window
    let lo = small_losses(dir.path(), "lo.csv", &(0..50).map(f64::from).collect::<Vec<_>>());
    let hi = small_losses(dir.path(), "hi.csv", &(100..150).map(f64::from).collect::<Vec<_>>());
    let o = run(&["audit", "--train", s(&hi), "--pop", s(&lo), "--method", "ecdf"], dir.path());
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn help_and_version_exit_0() {
    let dir = tempfile::tempdir().unwrap();
    for args in [vec!["--help"], vec!["--version"], vec!["audit", "--help"]] {
        assert_eq!(code(&run(&args, dir.path())), 0, "{args:?}");
    }
}

#[test]
fn simulate_is_deterministic_and_complete() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &Path| {
        vec![
            "simulate".to_string(),
            "--d-list".into(),
            "0,1".into(),
            "--n-list".into(),
            "500".into(),
            "--repeats".into(),
            "3".into(),
            "--seed".into(),
            "11".into(),
            "--svg".into(),
            "--out-dir".into(),
            out.to_str().unwrap().into(),
        ]
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    // the second run uses a different worker count
    for (out, threads) in [(&a, "1"), (&b, "4")] {
        let o = Command::new(BIN)
            .args(args(out))
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for name in ["simulation.csv", "simulation_summary.json", "simulation.svg"] {
        let x = std::fs::read(a.join(name)).unwrap();
        assert_eq!(x, std::fs::read(b.join(name)).unwrap(), "{name} differs between runs");
    }
    let csv = std::fs::read_to_string(a.join("simulation.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("d,n,method,repeat,epsilon_star"));
    // 2 offsets x 1 size x 3 methods x 3 repeats
    assert_eq!(lines.count(), 18);
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(a.join("simulation_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["cells"].as_array().unwrap().len(), 6);
}

#[test]
fn single_entry_mechanism_equals_its_instance() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("one.json");
    let (tr, po) = (data("landscape/s03_train.csv"), data("landscape/s03_pop.csv"));
    std::fs::write(
        &manifest,
        format!(r#"{{"entries": [{{"model_id": "only", "train": "{}", "pop": "{}"}}]}}"#, s(&tr), s(&po)),
    )
    .unwrap();
    let o = run(&["mechanism", "--manifest", s(&manifest), "--delta", "1e-5"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("mechanism.json")).unwrap()).unwrap();
    assert_eq!(v["schema"], "epsilon-star.mechanism/1");
    assert_eq!(v["holds"], true);
    assert_eq!(v["n_models"], 1);
    assert_eq!(v["epsilon_bar"], v["per_model_epsilon"][0]);
    assert!((v["epsilon_bar"].as_f64().unwrap() - v["jensen_bound"].as_f64().unwrap()).abs() <= 1e-12);
}

#[test]
fn mechanism_on_bundled_manifest_holds() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["mechanism", "--manifest", s(&data("landscape/manifest.json"))], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("mechanism.json")).unwrap()).unwrap();
    assert_eq!(v["holds"], true);
    assert_eq!(v["model_ids"].as_array().unwrap().len(), 12);
}

#[test]
fn ksfit_writes_five_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["ksfit", "--losses", s(&data("normal_sample.csv")), "--components", "1..5"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("ksfit.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 5);
    for (k, row) in rows.iter().enumerate() {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols[0], (k + 1).to_string());
        let p: f64 = cols[3].parse().unwrap();
        assert!((0.0..=1.0).contains(&p), "{row}");
    }
}

#[test]
fn landscape_frontier_matches_brute_force() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["landscape", "--manifest", s(&data("landscape/manifest.json"))], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("landscape.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("id,utility,eps_star_mean,eps_star_min,eps_star_max,dominant,hull,tags")
    );
    let rows: Vec<(String, f64, f64, bool)> = lines
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            (c[0].to_string(), c[1].parse().unwrap(), c[2].parse().unwrap(), c[5] == "true")
        })
        .collect();
    assert_eq!(rows.len(), 12);
    let brute: BTreeSet<&str> = rows
        .iter()
        .filter(|(_, u, e, _)| {
            !rows
                .iter()
                .any(|(_, u2, e2, _)| u2 >= u && e2 <= e && (u2 > u || e2 < e))
        })
        .map(|r| r.0.as_str())
        .collect();
    let flagged: BTreeSet<&str> = rows.iter().filter(|r| r.3).map(|r| r.0.as_str()).collect();
    assert_eq!(flagged, brute);

    let doc: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("landscape.json")).unwrap()).unwrap();
    assert_eq!(doc["schema"], "epsilon-star.landscape/1");
    let json_set: BTreeSet<&str> = doc["frontier"]["dominance_set"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(json_set, brute);
    let svg = std::fs::read_to_string(dir.path().join("landscape.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
}

#[test]
fn env_var_sets_default_output_dir_only() {
    let dir = tempfile::tempdir().unwrap();
    let f = data("normal_sample.csv");
    let explicit = dir.path().join("sub.json");
    let o = run(&["audit", "--train", s(&f), "--pop", s(&f), "--out", s(&explicit)], dir.path());
    assert_eq!(code(&o), 0);
    assert!(explicit.exists());
    assert!(!dir.path().join("audit.json").exists());
}
