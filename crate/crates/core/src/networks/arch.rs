use crate::error::{Error, Result};
use crate::numerics::RngStream;

use super::config::{FcnnConfig, Parameterization};
use super::fourier::FourierEmbedding;
use super::params::NetworkParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArchKind {
    Plain,
    Mff,
    Stmff,
}

/// How raw coordinates reach the shared trunk and how branch outputs are
/// merged before the final linear layer.
#[derive(Clone, Debug, PartialEq)]
pub enum ArchitectureSpec {
    /// Raw coordinates feed the trunk directly.
    Plain,
    /// Each embedding feeds the shared trunk; branch outputs are concatenated.
    Mff { embeddings: Vec<FourierEmbedding> },
    /// Spatial embeddings see coordinates `0..spatial_dims`, temporal
    /// embeddings see coordinate `spatial_dims` (the last one). Every
    /// spatial/temporal pair of branch outputs is multiplied point-wise and
    /// the products are concatenated, spatial-major.
    Stmff {
        spatial: Vec<FourierEmbedding>,
        temporal: Vec<FourierEmbedding>,
        spatial_dims: usize,
    },
}

impl ArchitectureSpec {
    pub fn kind(&self) -> ArchKind {
        match self {
            ArchitectureSpec::Plain => ArchKind::Plain,
            ArchitectureSpec::Mff { .. } => ArchKind::Mff,
            ArchitectureSpec::Stmff { .. } => ArchKind::Stmff,
        }
    }

    /// Every embedding, in branch order.
    pub fn embeddings(&self) -> Vec<&FourierEmbedding> {
        match self {
            ArchitectureSpec::Plain => vec![],
            ArchitectureSpec::Mff { embeddings } => embeddings.iter().collect(),
            ArchitectureSpec::Stmff {
                spatial, temporal, ..
            } => spatial.iter().chain(temporal).collect(),
        }
    }

    /// Replaces the embeddings, in branch order, keeping the topology.
    pub fn with_embeddings(&self, mut new: Vec<FourierEmbedding>) -> Result<Self> {
        let expected = self.embeddings().len();
        if new.len() != expected {
            return Err(Error::Shape(format!(
                "architecture has {expected} embeddings, got {}",
                new.len()
            )));
        }
        Ok(match self {
            ArchitectureSpec::Plain => ArchitectureSpec::Plain,
            ArchitectureSpec::Mff { .. } => ArchitectureSpec::Mff { embeddings: new },
            ArchitectureSpec::Stmff {
                spatial,
                spatial_dims,
                ..
            } => {
                let temporal = new.split_off(spatial.len());
                ArchitectureSpec::Stmff {
                    spatial: new,
                    temporal,
                    spatial_dims: *spatial_dims,
                }
            }
        })
    }
}

/// One pass through the shared trunk.
#[derive(Clone, Debug)]
pub(crate) struct BranchDesc<'a> {
    pub embedding: Option<&'a FourierEmbedding>,
    /// Global input coordinates this branch reads, in embedding column order.
    pub coords: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Merge {
    Concat,
    Product { n_spatial: usize, n_temporal: usize },
}

/// Position and scaling of one affine layer inside the flat parameter vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LayerSlot {
    /// Offset of the row-major `fan_out × fan_in` weight matrix.
    pub weight: usize,
    pub bias: usize,
    pub fan_in: usize,
    pub fan_out: usize,
    /// Prefactor applied to `W·z`.
    pub scale: f64,
}

impl LayerSlot {
    pub fn weight_len(&self) -> usize {
        self.fan_in * self.fan_out
    }
}

/// A trunk configuration bound to an architecture, with its parameter layout.
#[derive(Clone, Debug)]
pub struct Network {
    config: FcnnConfig,
    arch: ArchitectureSpec,
    hidden: Vec<LayerSlot>,
    output: LayerSlot,
    n_params: usize,
}

impl Network {
    pub fn new(config: FcnnConfig, arch: ArchitectureSpec) -> Result<Self> {
        config.validate()?;
        let mut problems = Vec::new();
        let d = config.input_dim;
        match &arch {
            ArchitectureSpec::Plain => {}
            ArchitectureSpec::Mff { embeddings } => {
                if embeddings.is_empty() {
                    problems.push("MFF needs at least one embedding".to_owned());
                }
                for (i, e) in embeddings.iter().enumerate() {
                    if e.d() != d {
                        problems.push(format!(
                            "embedding {i} expects dimension {}, network input is {d}",
                            e.d()
                        ));
                    }
                }
            }
            ArchitectureSpec::Stmff {
                spatial,
                temporal,
                spatial_dims,
            } => {
                if spatial.is_empty() || temporal.is_empty() {
                    problems.push("ST-MFF needs spatial and temporal embeddings".to_owned());
                }
                if spatial_dims + 1 != d {
                    problems.push(format!(
                        "ST-MFF splits {spatial_dims} spatial + 1 temporal coordinate, network input is {d}"
                    ));
                }
                for (i, e) in spatial.iter().enumerate() {
                    if e.d() != *spatial_dims {
                        problems.push(format!("spatial embedding {i} has dimension {}", e.d()));
                    }
                }
                for (i, e) in temporal.iter().enumerate() {
                    if e.d() != 1 {
                        problems.push(format!("temporal embedding {i} has dimension {}", e.d()));
                    }
                }
            }
        }
        let embs = arch.embeddings();
        if let Some(first) = embs.first() {
            if embs.iter().any(|e| e.m() != first.m()) {
                problems.push("all embeddings must share the same feature count m".to_owned());
            }
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }

        let first_in = embs.first().map_or(d, |e| e.output_dim());
        let n_merge = match &arch {
            ArchitectureSpec::Plain => 1,
            ArchitectureSpec::Mff { embeddings } => embeddings.len(),
            ArchitectureSpec::Stmff {
                spatial, temporal, ..
            } => spatial.len() * temporal.len(),
        };
        let ntk = config.parameterization == Parameterization::Ntk;
        let mut offset = 0;
        let mut slot = |fan_in: usize, fan_out: usize, first: bool| {
            let s = LayerSlot {
                weight: offset,
                bias: offset + fan_in * fan_out,
                fan_in,
                fan_out,
                scale: if ntk && !first {
                    1.0 / (fan_in as f64).sqrt()
                } else {
                    1.0
                },
            };
            offset += fan_in * fan_out + fan_out;
            s
        };
        let w = config.width;
        let hidden: Vec<LayerSlot> = (0..config.depth)
            .map(|l| slot(if l == 0 { first_in } else { w }, w, l == 0))
            .collect();
        let output = slot(n_merge * w, config.output_dim, false);
        Ok(Network {
            config,
            arch,
            hidden,
            output,
            n_params: offset,
        })
    }

    pub fn config(&self) -> &FcnnConfig {
        &self.config
    }

    pub fn arch(&self) -> &ArchitectureSpec {
        &self.arch
    }

    pub fn kind(&self) -> ArchKind {
        self.arch.kind()
    }

    pub fn input_dim(&self) -> usize {
        self.config.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.config.output_dim
    }

    pub fn width(&self) -> usize {
        self.config.width
    }

    /// Number of trainable network parameters (excluding extra scalars).
    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn hidden_layers(&self) -> &[LayerSlot] {
        &self.hidden
    }

    pub fn output_layer(&self) -> &LayerSlot {
        &self.output
    }

    /// Width of the merged feature vector entering the final layer.
    pub fn merged_width(&self) -> usize {
        self.output.fan_in
    }

    pub(crate) fn branches(&self) -> Vec<BranchDesc<'_>> {
        let d = self.config.input_dim;
        match &self.arch {
            ArchitectureSpec::Plain => vec![BranchDesc {
                embedding: None,
                coords: (0..d).collect(),
            }],
            ArchitectureSpec::Mff { embeddings } => embeddings
                .iter()
                .map(|e| BranchDesc {
                    embedding: Some(e),
                    coords: (0..d).collect(),
                })
                .collect(),
            ArchitectureSpec::Stmff {
                spatial,
                temporal,
                spatial_dims,
            } => spatial
                .iter()
                .map(|e| BranchDesc {
                    embedding: Some(e),
                    coords: (0..*spatial_dims).collect(),
                })
                .chain(temporal.iter().map(|e| BranchDesc {
                    embedding: Some(e),
                    coords: vec![*spatial_dims],
                }))
                .collect(),
        }
    }

    pub(crate) fn merge(&self) -> Merge {
        match &self.arch {
            ArchitectureSpec::Stmff {
                spatial, temporal, ..
            } => Merge::Product {
                n_spatial: spatial.len(),
                n_temporal: temporal.len(),
            },
            _ => Merge::Concat,
        }
    }

    pub(crate) fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() < self.n_params {
            return Err(Error::Shape(format!(
                "network needs {} parameters, got {}",
                self.n_params,
                theta.len()
            )));
        }
        Ok(())
    }
}

/// Draws initial parameters: Glorot-normal weights and zero biases in
/// standard mode, i.i.d. `N(0, 1)` for everything in NTK mode.
pub fn init_params(net: &Network, rng: &mut RngStream) -> NetworkParams {
    let mut theta = vec![0.0; net.n_params()];
    let ntk = net.config().parameterization == Parameterization::Ntk;
    for slot in net.hidden_layers().iter().chain([net.output_layer()]) {
        let sd = if ntk {
            1.0
        } else {
            (2.0 / (slot.fan_in + slot.fan_out) as f64).sqrt()
        };
        for w in &mut theta[slot.weight..slot.weight + slot.weight_len()] {
            *w = sd * rng.normal();
        }
        if ntk {
            for b in &mut theta[slot.bias..slot.bias + slot.fan_out] {
                *b = rng.normal();
            }
        }
    }
    NetworkParams::new(theta)
}
