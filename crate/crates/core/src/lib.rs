//! Physics-informed neural networks with multi-scale Fourier feature
//! embeddings, and a neural tangent kernel toolkit for studying their
//! spectral bias.
//!
//! - [`numerics`]: dense matrices, splittable RNG streams, reverse-mode and
//!   second-order forward-mode differentiation, a symmetric eigensolver and
//!   a direct DFT.
//! - [`networks`]: tanh MLPs in standard or NTK parameterization, Fourier
//!   feature embeddings and the plain / MFF / ST-MFF architectures, with a
//!   batched jet engine for input derivatives and parameter gradients.
//! - [`ntk`]: empirical kernels, PINN kernel blocks, the analytic cosine
//!   kernel and linearized training dynamics.
//! - [`pde`]: the Poisson, heat, wave and Gray-Scott benchmarks, plus an
//!   ETDRK4 pseudo-spectral reference solver.
//! - [`training`]: composite losses, Adam with step decay, NTK-based loss
//!   weights and the training loop.
//! - [`experiments`]: configuration, presets and the orchestration behind
//!   the `ffpinn` command line tool.

// Negated comparisons are used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod networks;
pub mod ntk;
pub mod numerics;
pub mod pde;
pub mod training;

pub use error::{Error, Result};
