//! Benchmark problems: 1D Poisson, 1D heat, 1D wave and the inverse 2D
//! Gray-Scott system, with an ETDRK4 reference solver and its dataset
//! format.

pub mod dataset;
pub mod domain;
pub mod eval;
pub mod exact;
pub mod grayscott;
pub mod operators;
pub mod problems;
pub mod sampling;

pub use dataset::{read_manifest, read_snapshots, write_dataset, DatasetMeta, ManifestRow, Observations};
pub use domain::{Domain, Interval};
pub use eval::{evaluate, predict_on_grid, relative_l2, Evaluation, GridPrediction};
pub use exact::exact_jet;
pub use grayscott::{
    fd_residual, gaussian_initial_condition, grayscott_reference, richardson_order,
    GrayScottParams, GrayScottState,
};
pub use operators::{GrayScottResidual, LinearOperator, Species};
pub use problems::{
    grayscott_problem, heat_problem, poisson_problem, wave_problem, Benchmark, EvalGrid, Face,
    LossTerm, PdeProblem, Region, SampleGroup,
};
pub use sampling::{sample_batch, GroupBatch, TrainingBatch};

/// Problem for a benchmark that needs no external data.
pub fn builtin_problem(benchmark: Benchmark) -> Option<PdeProblem> {
    match benchmark {
        Benchmark::Poisson1d => Some(poisson_problem()),
        Benchmark::Heat1d => Some(heat_problem()),
        Benchmark::Wave1d => Some(wave_problem()),
        Benchmark::GrayScott2d => None,
    }
}
