use std::path::PathBuf;

/// Errors produced anywhere in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("index {index} out of range for dimension {len}")]
    Index { index: usize, len: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("non-finite value in {location}")]
    NumericalOverflow { location: String },

    #[error("non-finite loss in term `{term}`")]
    NonFiniteLoss { term: String },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    NonConvergence { sweeps: usize, residual: f64 },

    #[error("matrix is not positive definite: smallest eigenvalue {smallest:e}")]
    Definiteness { smallest: f64 },

    #[error("degenerate kernel: trace of block `{term}` is zero")]
    DegenerateKernel { term: String },

    #[error("{what} of size {size} exceeds the cap of {cap}")]
    TooLarge { what: &'static str, size: usize, cap: usize },

    #[error("grid too coarse: {points_per_wavelength:.2} points per wavelength (need at least {required})")]
    GridTooCoarse { points_per_wavelength: f64, required: f64 },

    #[error("reference norm is zero")]
    ZeroNorm,

    #[error("empty dataset")]
    EmptyDataset,

    #[error("solver blow-up at t = {time}: |{field}| reached {value:e}")]
    BlowUp { time: f64, field: &'static str, value: f64 },

    #[error("invalid configuration: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("unsupported {what} schema version {found} (expected {expected})")]
    SchemaVersion { what: &'static str, found: u32, expected: u32 },

    #[error("malformed file {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by the numbers rather than by the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NumericalOverflow { .. }
                | Error::NonFiniteLoss { .. }
                | Error::NonConvergence { .. }
                | Error::Definiteness { .. }
                | Error::DegenerateKernel { .. }
                | Error::BlowUp { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
