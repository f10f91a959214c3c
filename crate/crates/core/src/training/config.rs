use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    #[default]
    Fixed,
    Adaptive,
}

fn default_lr() -> f64 {
    1e-3
}
fn default_decay_rate() -> f64 {
    0.9
}
fn default_decay_steps() -> u64 {
    1000
}
fn default_adaptive_interval() -> u64 {
    1000
}
fn default_probe_size() -> usize {
    128
}
fn default_eval_interval() -> u64 {
    100
}
fn default_checkpoint_interval() -> u64 {
    5000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingConfig {
    pub iterations: u64,
    #[serde(default = "default_lr")]
    pub learning_rate: f64,
    #[serde(default = "default_decay_rate")]
    pub decay_rate: f64,
    #[serde(default = "default_decay_steps")]
    pub decay_steps: u64,
    /// Points per sample group; the problem's defaults when absent.
    #[serde(default)]
    pub batch_sizes: Option<Vec<usize>>,
    #[serde(default)]
    pub weights: WeightMode,
    /// Per-term weights for fixed mode; all ones when absent.
    #[serde(default)]
    pub fixed_weights: Option<Vec<f64>>,
    #[serde(default = "default_adaptive_interval")]
    pub adaptive_interval: u64,
    /// Probe points per sample group for adaptive weights.
    #[serde(default = "default_probe_size")]
    pub probe_size: usize,
    #[serde(default = "default_eval_interval")]
    pub eval_interval: u64,
    #[serde(default = "default_checkpoint_interval")]
    pub checkpoint_interval: u64,
    #[serde(default)]
    pub seed: u64,
}

impl TrainingConfig {
    pub fn new(iterations: u64) -> Self {
        TrainingConfig {
            iterations,
            learning_rate: default_lr(),
            decay_rate: default_decay_rate(),
            decay_steps: default_decay_steps(),
            batch_sizes: None,
            weights: WeightMode::Fixed,
            fixed_weights: None,
            adaptive_interval: default_adaptive_interval(),
            probe_size: default_probe_size(),
            eval_interval: default_eval_interval(),
            checkpoint_interval: default_checkpoint_interval(),
            seed: 0,
        }
    }

    /// Problems with the configuration, as `key: reason` strings.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            out.push("training.learning_rate: must be positive".into());
        }
        if !(self.decay_rate > 0.0 && self.decay_rate <= 1.0) {
            out.push("training.decay_rate: must lie in (0, 1]".into());
        }
        for (key, v) in [
            ("training.decay_steps", self.decay_steps),
            ("training.adaptive_interval", self.adaptive_interval),
            ("training.eval_interval", self.eval_interval),
            ("training.checkpoint_interval", self.checkpoint_interval),
        ] {
            if v == 0 {
                out.push(format!("{key}: must be at least 1"));
            }
        }
        if self.probe_size == 0 {
            out.push("training.probe_size: must be at least 1".into());
        }
        if let Some(sizes) = &self.batch_sizes {
            if sizes.contains(&0) {
                out.push("training.batch_sizes: sizes must be positive".into());
            }
        }
        if let Some(w) = &self.fixed_weights {
            if w.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                out.push("training.fixed_weights: weights must be positive".into());
            }
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
}
