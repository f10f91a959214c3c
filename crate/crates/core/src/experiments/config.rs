use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::networks::{
    sample_fourier_features, ArchitectureSpec, FcnnConfig, Network, Parameterization,
};
use crate::numerics::RngStream;
use crate::pde::{Benchmark, GrayScottParams};
use crate::training::TrainingConfig;

/// What a configuration asks for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    /// Train a PINN on a benchmark.
    #[default]
    Pinn,
    /// Fit a 1D target function by full-batch regression.
    Regression,
    /// Eigen-decompose the empirical NTK of freshly initialized networks.
    Ntk,
    /// Run the Gray-Scott reference solver and store the snapshots.
    Dataset,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArchKindConfig {
    Plain,
    Mff,
    Stmff,
}

fn default_features() -> usize {
    100
}
fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArchitectureConfig {
    pub kind: ArchKindConfig,
    /// Hidden layers of the shared trunk.
    pub depth: usize,
    pub width: usize,
    #[serde(default)]
    pub parameterization: Parameterization,
    /// Rows `m` of each frequency matrix.
    #[serde(default = "default_features")]
    pub features: usize,
    /// One embedding per entry (mff).
    #[serde(default)]
    pub sigmas: Vec<f64>,
    /// Spatial embeddings (stmff).
    #[serde(default)]
    pub spatial_sigmas: Vec<f64>,
    /// Temporal embeddings (stmff).
    #[serde(default)]
    pub temporal_sigmas: Vec<f64>,
    /// Embed as `[cos 2πBx, sin 2πBx]`.
    #[serde(default = "yes")]
    pub two_pi: bool,
}

impl ArchitectureConfig {
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.depth == 0 {
            out.push("architecture.depth: must be at least 1".into());
        }
        if self.width == 0 {
            out.push("architecture.width: must be at least 1".into());
        }
        if self.kind != ArchKindConfig::Plain && self.features == 0 {
            out.push("architecture.features: must be at least 1".into());
        }
        let mut sig = |key: &str, list: &[f64], needed: bool| {
            if needed && list.is_empty() {
                out.push(format!("architecture.{key}: must not be empty"));
            }
            if list.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
                out.push(format!("architecture.{key}: scales must be positive"));
            }
        };
        match self.kind {
            ArchKindConfig::Plain => {}
            ArchKindConfig::Mff => sig("sigmas", &self.sigmas, true),
            ArchKindConfig::Stmff => {
                sig("spatial_sigmas", &self.spatial_sigmas, true);
                sig("temporal_sigmas", &self.temporal_sigmas, true);
            }
        }
        out
    }

    /// Builds the network, drawing frequency matrices from `rng` in
    /// declaration order.
    pub fn build(
        &self,
        input_dim: usize,
        output_dim: usize,
        spatial_dims: usize,
        rng: &mut RngStream,
    ) -> Result<Network> {
        let cfg = FcnnConfig::new(self.depth, self.width, input_dim)
            .with_output_dim(output_dim)
            .with_parameterization(self.parameterization);
        let mut embed = |d: usize, sigmas: &[f64]| -> Result<Vec<_>> {
            sigmas
                .iter()
                .map(|&s| sample_fourier_features(d, self.features, s, self.two_pi, rng))
                .collect()
        };
        let arch = match self.kind {
            ArchKindConfig::Plain => ArchitectureSpec::Plain,
            ArchKindConfig::Mff => ArchitectureSpec::Mff {
                embeddings: embed(input_dim, &self.sigmas)?,
            },
            ArchKindConfig::Stmff => {
                if spatial_dims + 1 != input_dim {
                    return Err(Error::Validation(vec![
                        "architecture.kind: stmff needs a time-dependent benchmark".into(),
                    ]));
                }
                ArchitectureSpec::Stmff {
                    spatial: embed(spatial_dims, &self.spatial_sigmas)?,
                    temporal: embed(1, &self.temporal_sigmas)?,
                    spatial_dims,
                }
            }
        };
        Network::new(cfg, arch)
    }
}

fn default_n_train() -> usize {
    100
}
fn default_n_test() -> usize {
    1000
}
fn default_band_threshold() -> f64 {
    0.1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TrainPoints {
    /// `x_i = i / N`, `i = 0..N`.
    #[default]
    Grid,
    /// `N` uniform draws on `[0, 1]`.
    Uniform,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegressionConfig {
    /// Target `Σ_k sin(a_k π x)`.
    pub target_frequencies: Vec<f64>,
    /// One run per scale, each with a single embedding.
    pub sigmas: Vec<f64>,
    pub epochs: usize,
    #[serde(default = "default_n_train")]
    pub n_train: usize,
    #[serde(default)]
    pub train_points: TrainPoints,
    /// Evenly spaced test points on `[0, 1]`.
    #[serde(default = "default_n_test")]
    pub n_test: usize,
    #[serde(default = "crate::experiments::config::default_lr")]
    pub learning_rate: f64,
    /// Inclusive DFT bin ranges tracked per epoch (grid points only).
    #[serde(default)]
    pub bands: Vec<[usize; 2]>,
    #[serde(default = "default_band_threshold")]
    pub band_threshold: f64,
}

pub(crate) fn default_lr() -> f64 {
    1e-3
}

impl RegressionConfig {
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.target_frequencies.is_empty() {
            out.push("regression.target_frequencies: must not be empty".into());
        }
        if self.sigmas.is_empty() || self.sigmas.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            out.push("regression.sigmas: need at least one positive scale".into());
        }
        if self.epochs == 0 {
            out.push("regression.epochs: must be at least 1".into());
        }
        if self.n_train < 4 {
            out.push("regression.n_train: must be at least 4".into());
        }
        if self.n_test < 2 {
            out.push("regression.n_test: must be at least 2".into());
        }
        if !(self.learning_rate > 0.0) {
            out.push("regression.learning_rate: must be positive".into());
        }
        if !self.bands.is_empty() && self.train_points != TrainPoints::Grid {
            out.push("regression.bands: need grid training points".into());
        }
        for b in &self.bands {
            if b[0] > b[1] || b[1] > self.n_train / 2 {
                out.push(format!("regression.bands: bad range {b:?}"));
            }
        }
        out
    }
}

fn default_ntk_sigmas() -> Vec<f64> {
    vec![1.0, 5.0, 10.0, 20.0, 50.0]
}
fn default_ntk_seeds() -> usize {
    5
}
fn default_grid() -> usize {
    100
}
fn default_vectors() -> usize {
    6
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NtkConfig {
    /// Single-embedding scales to sweep; ignored for plain networks.
    #[serde(default = "default_ntk_sigmas")]
    pub sigmas: Vec<f64>,
    /// Independent initializations per scale.
    #[serde(default = "default_ntk_seeds")]
    pub seeds: usize,
    /// Evenly spaced points on `[0, 1]`, endpoints included.
    #[serde(default = "default_grid")]
    pub grid_points: usize,
    #[serde(default = "default_vectors")]
    pub eigenvectors: usize,
}

impl Default for NtkConfig {
    fn default() -> Self {
        NtkConfig {
            sigmas: default_ntk_sigmas(),
            seeds: default_ntk_seeds(),
            grid_points: default_grid(),
            eigenvectors: default_vectors(),
        }
    }
}

fn default_window() -> [f64; 2] {
    [200.0, 400.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    /// Stored observation grid.
    pub n: usize,
    /// Solver grid; a multiple of `n`, defaults to `n`.
    #[serde(default)]
    pub solver_n: Option<usize>,
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_every: f64,
    #[serde(default)]
    pub params: GrayScottParams,
    /// Existing or target dataset directory; `<out>/dataset` when absent.
    #[serde(default)]
    pub dir: Option<PathBuf>,
    /// Observation window used for training.
    #[serde(default = "default_window")]
    pub window: [f64; 2],
}

impl DatasetConfig {
    pub fn solver_grid(&self) -> usize {
        self.solver_n.unwrap_or(self.n)
    }

    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.n < 4 || !self.n.is_power_of_two() {
            out.push("dataset.n: must be a power of two, at least 4".into());
        }
        let s = self.solver_grid();
        if s < self.n || s % self.n.max(1) != 0 || !s.is_power_of_two() {
            out.push("dataset.solver_n: must be a power-of-two multiple of n".into());
        }
        if !(self.dt > 0.0) || !(self.t_end > 0.0) || !(self.snapshot_every > 0.0) {
            out.push("dataset: dt, t_end and snapshot_every must be positive".into());
        }
        if !(self.window[0] < self.window[1]) || self.window[1] > self.t_end {
            out.push("dataset.window: need t0 < t1 <= t_end".into());
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub task: Task,
    #[serde(default)]
    pub benchmark: Option<String>,
    #[serde(default)]
    pub architecture: Option<ArchitectureConfig>,
    #[serde(default)]
    pub training: Option<TrainingConfig>,
    #[serde(default)]
    pub regression: Option<RegressionConfig>,
    #[serde(default)]
    pub ntk: Option<NtkConfig>,
    #[serde(default)]
    pub dataset: Option<DatasetConfig>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentConfig {
    /// Parses JSON text; syntax and unknown keys are validation errors.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Validation(vec![format!("config: {e}")]))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn benchmark(&self) -> Result<Benchmark> {
        let id = self
            .benchmark
            .as_deref()
            .ok_or_else(|| Error::Validation(vec!["benchmark: missing".into()]))?;
        Benchmark::from_id(id)
            .ok_or_else(|| Error::Validation(vec![format!("benchmark: unknown id `{id}`")]))
    }

    /// Every problem with the configuration, as `key: reason` strings.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let need = |out: &mut Vec<String>, present: bool, key: &str| {
            if !present {
                out.push(format!("{key}: missing"));
            }
        };
        if let Some(a) = &self.architecture {
            out.extend(a.problems());
        }
        match self.task {
            Task::Pinn => {
                match self.benchmark() {
                    Err(Error::Validation(v)) => out.extend(v),
                    Err(e) => out.push(e.to_string()),
                    Ok(b) => {
                        if b == Benchmark::GrayScott2d {
                            need(&mut out, self.dataset.is_some(), "dataset");
                        }
                        if let Some(a) = &self.architecture {
                            if a.kind == ArchKindConfig::Stmff && !b.is_time_dependent() {
                                out.push(format!("architecture.kind: stmff needs a time-dependent benchmark, {b} is not"));
                            }
                        }
                    }
                }
                need(&mut out, self.architecture.is_some(), "architecture");
                match &self.training {
                    None => out.push("training: missing".into()),
                    Some(t) => {
                        if t.iterations == 0 {
                            out.push("training.iterations: must be at least 1".into());
                        }
                        out.extend(t.problems());
                    }
                }
            }
            Task::Regression => {
                need(&mut out, self.architecture.is_some(), "architecture");
                match &self.regression {
                    None => out.push("regression: missing".into()),
                    Some(r) => out.extend(r.problems()),
                }
            }
            Task::Ntk => {
                need(&mut out, self.architecture.is_some(), "architecture");
                let n = self.ntk.clone().unwrap_or_default();
                if n.grid_points < 4 {
                    out.push("ntk.grid_points: must be at least 4".into());
                }
                if n.seeds == 0 {
                    out.push("ntk.seeds: must be at least 1".into());
                }
                if n.sigmas.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
                    out.push("ntk.sigmas: scales must be positive".into());
                }
                if let Some(a) = &self.architecture {
                    if a.kind == ArchKindConfig::Stmff {
                        out.push("architecture.kind: NTK analysis needs plain or mff".into());
                    }
                    if a.kind == ArchKindConfig::Mff && n.sigmas.is_empty() {
                        out.push("ntk.sigmas: must not be empty".into());
                    }
                }
            }
            Task::Dataset => {}
        }
        if let Some(d) = &self.dataset {
            out.extend(d.problems());
        } else if self.task == Task::Dataset {
            out.push("dataset: missing".into());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.problems();
        if p.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(p))
        }
    }

    /// Output directory: the override, else the configured one, else
    /// `runs/<name>`.
    pub fn output_dir(&self, overridden: Option<&Path>) -> PathBuf {
        if let Some(p) = overridden {
            return p.to_path_buf();
        }
        if let Some(p) = &self.output.dir {
            return p.clone();
        }
        PathBuf::from("runs").join(self.name.as_deref().unwrap_or("experiment"))
    }

    /// Sets the experiment seed and the training seed together.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        if let Some(t) = &mut self.training {
            t.seed = seed;
        }
        self
    }
}
