//! Empirical neural tangent kernels, PINN kernel blocks, the analytic
//! cosine kernel and linearized training dynamics.

pub mod analytic;
pub mod blocks;
pub mod dynamics;
pub mod kernel;
pub mod prop2;
pub mod spectrum;

pub use analytic::{
    analytic_cos_kernel_matrix, discretized_cos_operator, lemma1_residual, prop1_eigenvalues,
};
pub use blocks::{operator_jacobian, pinn_ntk_blocks, PinnNtkBlocks, PointOperator};
pub use dynamics::{error_mode_decomposition, linearized_dynamics, ErrorModes};
pub use kernel::{gram, ntk_matrix, ntk_matrix_fn, output_jacobian, KernelEigenSystem};
pub use prop2::{prop2_assemble, Prop2Assembly};
pub use spectrum::{dominant_frequency, eigenvectors_csv, spectrum_csv};
