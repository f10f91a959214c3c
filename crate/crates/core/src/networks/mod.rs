//! Tanh networks, Fourier feature embeddings and the plain / MFF / ST-MFF
//! architectures.

pub mod arch;
pub mod checkpoint;
pub mod config;
pub mod engine;
pub mod fourier;
pub mod generic;
pub mod params;

pub use arch::{init_params, ArchKind, ArchitectureSpec, LayerSlot, Network};
pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint};
pub use config::{Activation, FcnnConfig, Parameterization};
pub use engine::{Channel, Jet, JetCache, JetSpec};
pub use fourier::{embed, sample_fourier_features, FourierEmbedding};
pub use generic::{
    branch_outputs, forward_generic, forward_mff, forward_plain, forward_stmff, merged_features,
    NetworkFn,
};
pub use params::NetworkParams;
