use std::path::Path;
use std::process::Command;

use ffpinn::experiments::{
    self, preset, preset_names, ExperimentConfig, ExperimentRecord, RunStatus, Task, RECORD_FILE,
    SUMMARY_FILE,
};
use ffpinn::Error;

fn small_poisson(seed: u64) -> ExperimentConfig {
    ExperimentConfig::from_json(&format!(
        r#"{{
            "name": "small-poisson",
            "benchmark": "poisson1d",
            "architecture": {{ "kind": "mff", "depth": 2, "width": 16, "features": 8, "sigmas": [1, 10] }},
            "training": {{ "iterations": 30, "batch_sizes": [16, 16], "eval_interval": 10 }},
            "seed": {seed}
        }}"#
    ))
    .unwrap()
}

fn summary(dir: &Path) -> serde_json::Map<String, serde_json::Value> {
    let text = std::fs::read_to_string(dir.join(SUMMARY_FILE)).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn data_rows(path: &Path) -> Vec<Vec<f64>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("#schema_version=1"), "{}", path.display());
    lines.next().expect("header");
    lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

#[test]
fn every_preset_parses_and_validates() {
    let names = preset_names();
    for required in [
        "fig1-plain-poisson",
        "poisson-mff",
        "heat-stmff",
        "wave-stmff-adaptive",
        "grayscott-inverse",
        "ntk-sigma-sweep",
        "regression-spectral-bias",
    ] {
        assert!(names.contains(&required), "{required}");
    }
    for name in names {
        let cfg = preset(name).unwrap_or_else(|e| panic!("{name}: {e}"));
        cfg.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(cfg.name.as_deref(), Some(name));
        let back = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
    }
    assert!(matches!(preset("nope"), Err(Error::Validation(_))));
}

#[test]
fn poisson_mff_preset_writes_summary_with_relative_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = preset("poisson-mff").unwrap();
    cfg.training.as_mut().unwrap().iterations = 5;
    let rec = experiments::run(&cfg, dir.path(), None).unwrap();
    assert_eq!(rec.status, RunStatus::Ok);
    let s = summary(dir.path());
    for key in ["benchmark", "seed", "iterations", "final_relative_l2", "wall_seconds", "schema_version"] {
        assert!(s.contains_key(key), "{key}");
    }
    assert_eq!(s["benchmark"], "poisson1d");
    for a in &rec.artifacts {
        assert!(dir.path().join(a).exists(), "{a}");
    }
    let log = data_rows(&dir.path().join("log.csv"));
    assert_eq!(log.len(), 2);
    let pred = data_rows(&dir.path().join("prediction.csv"));
    assert!(pred.iter().all(|r| r.len() == 4 && (r[1] - r[2]).abs() == r[3]));
}

#[test]
fn unknown_benchmark_is_a_validation_error() {
    let mut cfg = small_poisson(0);
    cfg.benchmark = Some("burgers1d".into());
    let dir = tempfile::tempdir().unwrap();
    match experiments::run(&cfg, dir.path(), None) {
        Err(Error::Validation(keys)) => assert!(keys.iter().any(|k| k.starts_with("benchmark")), "{keys:?}"),
        other => panic!("{other:?}"),
    }
    assert!(!dir.path().join(RECORD_FILE).exists());
}

#[test]
fn invalid_configs_list_offending_keys() {
    let bad = r#"{
        "benchmark": "heat1d",
        "architecture": { "kind": "mff", "depth": 0, "width": 16, "sigmas": [] },
        "training": { "iterations": 0 }
    }"#;
    let cfg = ExperimentConfig::from_json(bad).unwrap();
    let Err(Error::Validation(keys)) = cfg.validate() else {
        panic!("accepted")
    };
    for k in ["architecture.depth", "architecture.sigmas", "training.iterations"] {
        assert!(keys.iter().any(|p| p.starts_with(k)), "{k} not in {keys:?}");
    }
    assert!(matches!(
        ExperimentConfig::from_json(r#"{"benchmark": "heat1d", "colour": 1}"#),
        Err(Error::Validation(_))
    ));
}

#[test]
fn same_config_twice_gives_identical_metrics() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let r1 = experiments::run(&small_poisson(7), a.path(), None).unwrap();
    let r2 = experiments::run(&small_poisson(7), b.path(), None).unwrap();
    assert_eq!(r1, r2);
    assert_eq!(
        std::fs::read(a.path().join("log.csv")).unwrap(),
        std::fs::read(b.path().join("log.csv")).unwrap()
    );
    let r3 = experiments::run(&small_poisson(8), b.path(), None).unwrap();
    assert_ne!(r1.metrics["final_relative_l2"], r3.metrics["final_relative_l2"]);
    assert_ne!(r1.input_hash, r3.input_hash);
}

#[test]
fn record_rejects_unknown_schema_version() {
    let dir = tempfile::tempdir().unwrap();
    experiments::run(&small_poisson(1), dir.path(), None).unwrap();
    let path = dir.path().join(RECORD_FILE);
    let rec = ExperimentRecord::load(&path).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    v["schema_version"] = 2.into();
    std::fs::write(&path, v.to_string()).unwrap();
    assert!(matches!(
        ExperimentRecord::load(&path),
        Err(Error::SchemaVersion { found: 2, .. })
    ));
    assert_eq!(rec.config["benchmark"], "poisson1d");
    assert_eq!(rec.input_hash.len(), 64);
}

#[test]
fn content_hash_is_git_blob_style() {
    // `printf 'hello\n' | git hash-object --stdin` under sha256
    let h = experiments::content_hash(&[b"hel", b"lo\n"]);
    assert_eq!(h, experiments::content_hash(&[b"hello\n"]));
    assert_eq!(h, "2cf8d83d9ee29543b34a87727421fdecb7e3f3a183d337639025de576db9ebb4");
}

#[test]
fn aborted_run_is_recorded_as_failed() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_poisson(0);
    cfg.training.as_mut().unwrap().fixed_weights = Some(vec![1e308, 1e308]);
    let rec = experiments::run(&cfg, dir.path(), None).unwrap();
    assert_eq!(rec.status, RunStatus::Failed);
    assert!(rec.error.is_some());
    assert_eq!(summary(dir.path())["status"], "failed");
    assert!(dir.path().join(RECORD_FILE).exists());
}

#[test]
fn ntk_sigma_sweep_writes_one_row_per_scale() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = preset("ntk-sigma-sweep").unwrap();
    let arch = cfg.architecture.as_mut().unwrap();
    arch.width = 32;
    arch.depth = 2;
    let ntk = cfg.ntk.as_mut().unwrap();
    ntk.seeds = 2;
    ntk.grid_points = 32;
    let rec = experiments::run(&cfg, dir.path(), None).unwrap();
    let rows = data_rows(&dir.path().join("dominant_frequency.csv"));
    assert_eq!(rows.len(), 5);
    let sigmas: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    assert_eq!(sigmas, [1.0, 5.0, 10.0, 20.0, 50.0]);
    assert!(rows.iter().all(|r| r.len() == 3 + 2));
    for s in ["sigma1", "sigma50"] {
        assert!(rec.metrics.contains_key(&format!("{s}_median_dominant_frequency")));
        assert!(dir.path().join(format!("eigenvalues_{s}.csv")).exists());
        let vecs = data_rows(&dir.path().join(format!("eigenvectors_{s}.csv")));
        assert_eq!(vecs.len(), 32);
        assert_eq!(vecs[0].len(), 1 + 6);
    }
}

#[test]
fn plain_ntk_eigenvalues_are_sorted_descending() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::from_json(
        r#"{
            "task": "ntk",
            "architecture": { "kind": "plain", "depth": 2, "width": 64 },
            "ntk": { "seeds": 1, "grid_points": 100 }
        }"#,
    )
    .unwrap();
    experiments::run(&cfg, dir.path(), None).unwrap();
    let rows = data_rows(&dir.path().join("eigenvalues_plain.csv"));
    assert_eq!(rows.len(), 100);
    assert!(rows.windows(2).all(|w| w[0][1] >= w[1][1]));
    assert!(rows[0][1] > 0.0);
    assert_eq!(data_rows(&dir.path().join("dominant_frequency.csv")).len(), 1);
}

#[test]
fn ntk_grid_above_cap_is_rejected() {
    let cfg = ExperimentConfig::from_json(
        r#"{
            "task": "ntk",
            "architecture": { "kind": "plain", "depth": 1, "width": 4 },
            "ntk": { "seeds": 1, "grid_points": 1025 }
        }"#,
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(
        experiments::run(&cfg, dir.path(), None),
        Err(Error::TooLarge { size: 1025, cap: 1024, .. })
    ));
}

#[test]
fn regression_run_reports_per_scale_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::from_json(
        r#"{
            "task": "regression",
            "architecture": { "kind": "mff", "depth": 2, "width": 16, "features": 8, "sigmas": [1] },
            "regression": {
                "target_frequencies": [1, 2], "sigmas": [1, 10], "epochs": 20,
                "n_train": 32, "n_test": 64, "bands": [[0, 2]]
            }
        }"#,
    )
    .unwrap();
    let rec = experiments::run(&cfg, dir.path(), None).unwrap();
    for s in ["sigma1", "sigma10"] {
        for k in ["train_relative_l2", "test_relative_l2", "param_displacement", "band_0_2_first_below"] {
            assert!(rec.metrics.contains_key(&format!("{s}_{k}")), "{s}_{k}");
        }
        let hist = data_rows(&dir.path().join(format!("history_{s}.csv")));
        assert_eq!(hist.len(), 21);
        assert_eq!(hist[0][0], 0.0);
        let fit = data_rows(&dir.path().join(format!("fit_{s}.csv")));
        assert_eq!(fit.len(), 64);
    }
    let rec2 = experiments::run(&cfg, dir.path(), None).unwrap();
    assert_eq!(rec, rec2);
}

fn tiny_dataset_json(dir: &Path) -> String {
    format!(
        r#"{{ "n": 16, "dt": 0.5, "t_end": 20, "snapshot_every": 10, "window": [10, 20], "dir": {:?} }}"#,
        dir.to_str().unwrap()
    )
}

#[test]
fn grayscott_run_reports_fields_and_inferred_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::from_json(&format!(
        r#"{{
            "name": "gs-tiny",
            "benchmark": "grayscott2d",
            "architecture": {{ "kind": "stmff", "depth": 2, "width": 16, "features": 8,
                               "spatial_sigmas": [1], "temporal_sigmas": [1] }},
            "training": {{ "iterations": 3, "batch_sizes": [32, 32] }},
            "dataset": {}
        }}"#,
        tiny_dataset_json(&dir.path().join("data"))
    ))
    .unwrap();
    let out = dir.path().join("run");
    experiments::run(&cfg, &out, None).unwrap();
    let s = summary(&out);
    for key in [
        "final_relative_l2_u",
        "final_relative_l2_v",
        "eps1",
        "eps2",
        "eps1_relative_error",
        "eps2_relative_error",
        "wall_seconds",
    ] {
        assert!(s.contains_key(key), "{key}");
    }
    let rows = data_rows(&out.join("prediction.csv"));
    // two snapshots of 16 x 16 with physical time in the last input column
    assert_eq!(rows.len(), 2 * 256);
    assert!(rows.iter().all(|r| r.len() == 3 + 6 && (10.0..=20.0).contains(&r[2])));
}

#[test]
fn desk_dataset_preset_has_41_snapshots_and_is_reproducible() {
    let root = tempfile::tempdir().unwrap();
    let mut cfg = preset("grayscott-dataset").unwrap();
    assert_eq!(cfg.task, Task::Dataset);
    let first = root.path().join("a");
    cfg.dataset.as_mut().unwrap().dir = Some(first.clone());
    let rec = experiments::run(&cfg, root.path(), None).unwrap();
    assert_eq!(rec.metrics["snapshots"], 41.0);
    let manifest = ffpinn::pde::dataset::read_manifest(&first).unwrap();
    assert_eq!(manifest.len(), 41);
    for (k, row) in manifest.iter().enumerate() {
        assert_eq!(row.time, 10.0 * k as f64);
        assert!(first.join(&row.file).is_file(), "{}", row.file);
    }
    let second = root.path().join("b");
    cfg.dataset.as_mut().unwrap().dir = Some(second.clone());
    experiments::run(&cfg, root.path(), None).unwrap();
    for row in &manifest {
        assert_eq!(
            std::fs::read(first.join(&row.file)).unwrap(),
            std::fs::read(second.join(&row.file)).unwrap(),
            "{}",
            row.file
        );
    }
}

#[test]
fn registry_lists_and_describes_benchmarks() {
    let list = experiments::list();
    let ids: Vec<&str> = list.lines().collect();
    assert_eq!(ids, ["poisson1d", "heat1d", "wave1d", "grayscott2d"]);
    assert!(experiments::describe("poisson1d").unwrap().contains("sigma = 1, 10"));
    assert!(experiments::describe("heat1d").unwrap().contains("sigma_x = 200, sigma_t = 1"));
    assert!(experiments::describe("wave1d").unwrap().contains("sigma_x = 1, sigma_t = 1, 10"));
    assert!(experiments::describe("grayscott2d").unwrap().contains("sigma_x = 30, sigma_t = 1"));
    assert!(matches!(experiments::describe("kdv"), Err(Error::Validation(_))));
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ffpinn"))
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"benchmark": "poisson1d", "architecture": {"kind": "mff", "depth": 2, "width": 8}}"#).unwrap();
    let out = cli().args(["run", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("architecture.sigmas") && err.contains("training"), "{err}");

    assert_eq!(cli().args(["describe", "nope"]).output().unwrap().status.code(), Some(2));
    assert_eq!(cli().args(["run", "--preset", "nope"]).output().unwrap().status.code(), Some(2));
    let list = cli().arg("list").output().unwrap();
    assert_eq!(list.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&list.stdout).contains("grayscott2d"));

    let mut cfg = small_poisson(0);
    cfg.training.as_mut().unwrap().fixed_weights = Some(vec![1e308, 1e308]);
    let failing = dir.path().join("fail.json");
    std::fs::write(&failing, cfg.to_json()).unwrap();
    let out = cli()
        .args(["run", "--quiet", "--config"])
        .arg(&failing)
        .arg("--out")
        .arg(dir.path().join("fail"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn cli_seed_override_and_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("c.json");
    std::fs::write(&cfg_path, small_poisson(0).to_json()).unwrap();
    let out = dir.path().join("o");
    let run = cli()
        .args(["run", "-q", "--seed", "11", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(run.status.success());
    assert!(String::from_utf8_lossy(&run.stdout).contains("final_relative_l2 = "));
    let s = summary(&out);
    assert_eq!(s["seed"], 11);
    let direct = tempfile::tempdir().unwrap();
    let rec = experiments::run(&small_poisson(11), direct.path(), None).unwrap();
    assert_eq!(ExperimentRecord::load(&out.join(RECORD_FILE)).unwrap().metrics, rec.metrics);
}
