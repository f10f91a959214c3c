use crate::error::{Error, Result};

/// Flat trainable parameters: network weights and biases, followed by any
/// extra scalar unknowns (for example log-diffusivities of an inverse
/// problem).
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkParams {
    values: Vec<f64>,
    n_network: usize,
}

impl NetworkParams {
    pub fn new(network: Vec<f64>) -> Self {
        let n_network = network.len();
        NetworkParams {
            values: network,
            n_network,
        }
    }

    /// Parameters with `extra` scalars appended after the network block.
    pub fn with_extra(mut self, extra: &[f64]) -> Self {
        self.values.truncate(self.n_network);
        self.values.extend_from_slice(extra);
        self
    }

    pub fn from_parts(values: Vec<f64>, n_network: usize) -> Result<Self> {
        if n_network > values.len() {
            return Err(Error::Shape(format!(
                "network block of {n_network} exceeds {} parameters",
                values.len()
            )));
        }
        Ok(NetworkParams { values, n_network })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn n_network(&self) -> usize {
        self.n_network
    }

    pub fn n_extra(&self) -> usize {
        self.values.len() - self.n_network
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn network(&self) -> &[f64] {
        &self.values[..self.n_network]
    }

    pub fn extra(&self) -> &[f64] {
        &self.values[self.n_network..]
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }
}
