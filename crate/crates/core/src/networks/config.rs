use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How layers are scaled and initialized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Parameterization {
    /// Every layer after the first is scaled by `1/√fan_in`; all parameters
    /// start as `N(0, 1)`.
    Ntk,
    /// No prefactors; Glorot-normal weights and zero biases.
    #[default]
    Standard,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Tanh,
}

/// Shape of the shared fully-connected trunk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FcnnConfig {
    /// Number of hidden layers.
    pub depth: usize,
    pub width: usize,
    #[serde(default)]
    pub activation: Activation,
    #[serde(default)]
    pub parameterization: Parameterization,
    /// Number of raw input coordinates.
    pub input_dim: usize,
    #[serde(default = "one")]
    pub output_dim: usize,
}

fn one() -> usize {
    1
}

impl FcnnConfig {
    pub fn new(depth: usize, width: usize, input_dim: usize) -> Self {
        FcnnConfig {
            depth,
            width,
            activation: Activation::Tanh,
            parameterization: Parameterization::Standard,
            input_dim,
            output_dim: 1,
        }
    }

    pub fn with_parameterization(mut self, p: Parameterization) -> Self {
        self.parameterization = p;
        self
    }

    pub fn with_output_dim(mut self, n: usize) -> Self {
        self.output_dim = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.depth < 1 {
            problems.push("depth must be at least 1".to_owned());
        }
        if self.width < 1 {
            problems.push("width must be at least 1".to_owned());
        }
        if self.input_dim < 1 {
            problems.push("input_dim must be at least 1".to_owned());
        }
        if self.output_dim < 1 {
            problems.push("output_dim must be at least 1".to_owned());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }
}
