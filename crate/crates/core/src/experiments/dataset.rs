use std::path::Path;

use crate::error::Result;
use crate::pde::dataset::{read_manifest, write_dataset, DatasetMeta, ManifestRow, DATASET_VERSION, MANIFEST_FILE};
use crate::pde::{gaussian_initial_condition, grayscott_reference};

use super::config::DatasetConfig;

/// Solves on the solver grid from the Gaussian-spot initial condition and
/// stores every snapshot on the observation grid.
pub fn generate_dataset(cfg: &DatasetConfig, dir: &Path) -> Result<Vec<ManifestRow>> {
    let solver_n = cfg.solver_grid();
    let (u0, v0) = gaussian_initial_condition(solver_n);
    let states = grayscott_reference(cfg.params, &u0, &v0, solver_n, cfg.dt, cfg.t_end, cfg.snapshot_every)?;
    let states = states
        .iter()
        .map(|s| s.subsample(cfg.n))
        .collect::<Result<Vec<_>>>()?;
    let meta = DatasetMeta {
        schema_version: DATASET_VERSION,
        n: cfg.n,
        dt: cfg.dt,
        t_end: cfg.t_end,
        snapshot_every: cfg.snapshot_every,
        params: cfg.params,
        solver_n: (solver_n != cfg.n).then_some(solver_n),
    };
    write_dataset(dir, &states, &meta)
}

/// Reuses the dataset in `dir` when a manifest is present, else generates
/// it.
pub fn ensure_dataset(cfg: &DatasetConfig, dir: &Path) -> Result<Vec<ManifestRow>> {
    if dir.join(MANIFEST_FILE).exists() {
        read_manifest(dir)
    } else {
        generate_dataset(cfg, dir)
    }
}
