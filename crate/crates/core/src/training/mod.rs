//! Composite PINN losses, Adam with step decay, NTK-based loss weights and
//! the training loop.

pub mod adam;
pub mod adaptive;
pub mod config;
pub mod log;
pub mod loss;
pub mod regression;
pub mod trainer;

pub use adam::{adam_step, lr_schedule, OptimizerState};
pub use adaptive::{adaptive_weights_update, term_kernel_traces, weights_from_traces};
pub use config::{TrainingConfig, WeightMode};
pub use log::{LogRecord, TrainingLog};
pub use loss::{loss_and_grad, total_loss, total_loss_with, LossValue, LossWeights};
pub use regression::{
    band_errors, fit_regression, regression_loss_grad, RegressionLoss, RegressionOptimizer,
    RegressionOutcome,
};
pub use trainer::{displacement_ratio, train, TrainHooks, TrainingOutcome};
