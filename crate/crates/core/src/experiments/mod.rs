//! Experiment orchestration: configs, presets, runs and their records.

pub mod config;
pub mod dataset;
pub mod ntk;
pub mod pinn;
pub mod presets;
pub mod record;
pub mod regression;
pub mod registry;

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use crate::error::Result;
use crate::pde::dataset::MANIFEST_FILE;

pub use config::{
    ArchKindConfig, ArchitectureConfig, DatasetConfig, ExperimentConfig, NtkConfig, OutputConfig,
    RegressionConfig, Task, TrainPoints,
};
pub use dataset::{ensure_dataset, generate_dataset};
pub use ntk::{analyze_ntk, sigma_sweep, spectral_centroid, ScaleSpectrum};
pub use pinn::{run_pinn, setup_pinn, PinnSetup};
pub use presets::{preset, preset_names};
pub use record::{content_hash, ExperimentRecord, RunStatus, RECORD_FILE, SUMMARY_FILE};
pub use regression::{fit_one, run_regression, RegressionRun};
pub use registry::{describe, list};

/// Optional sink for human-readable progress lines.
pub type Progress<'a> = Option<&'a mut dyn FnMut(&str)>;

/// Runs whatever task the configuration names, writing into `out`.
pub fn run(config: &ExperimentConfig, out: &Path, progress: Progress<'_>) -> Result<ExperimentRecord> {
    config.validate()?;
    match config.task {
        Task::Pinn => run_pinn(config, out, progress),
        Task::Regression => run_regression(config, out, progress),
        Task::Ntk => analyze_ntk(config, out, progress),
        Task::Dataset => run_dataset(config, out, progress),
    }
}

/// Generates the dataset into `dataset.dir`, or `out/dataset`, and records
/// the run in `out`.
pub fn run_dataset(config: &ExperimentConfig, out: &Path, mut progress: Progress<'_>) -> Result<ExperimentRecord> {
    config.validate()?;
    let start = Instant::now();
    let ds = config.dataset.as_ref().expect("validated");
    let dir = ds.dir.clone().unwrap_or_else(|| out.join("dataset"));
    let rows = generate_dataset(ds, &dir)?;
    let manifest = std::fs::read(dir.join(MANIFEST_FILE))?;
    if let Some(p) = progress.as_mut() {
        p(&format!("{} snapshots written to {}", rows.len(), dir.display()));
    }
    let mut metrics = BTreeMap::new();
    metrics.insert("snapshots".to_owned(), rows.len() as f64);
    metrics.insert("n".to_owned(), ds.n as f64);
    metrics.insert("solver_n".to_owned(), ds.solver_grid() as f64);
    let rel = |f: &str| match dir.strip_prefix(out) {
        Ok(d) => d.join(f).to_string_lossy().into_owned(),
        Err(_) => dir.join(f).to_string_lossy().into_owned(),
    };
    let mut artifacts = vec![rel(MANIFEST_FILE)];
    artifacts.extend(rows.iter().map(|r| rel(&r.file)));
    record::finish_run(record::RunEnd {
        config,
        out,
        extra_inputs: &[],
        header: vec![
            ("task", "dataset".into()),
            ("benchmark", "grayscott2d".into()),
            ("manifest_hash", content_hash(&[&manifest]).into()),
        ],
        metrics,
        artifacts,
        status: RunStatus::Ok,
        error: None,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}
