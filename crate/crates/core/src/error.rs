use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("value {value} outside [0, 1] in {op}")]
    OutOfRange { op: &'static str, value: f64 },

    #[error("signal of {len} samples is shorter than one {window}-sample window")]
    SignalTooShort { len: usize, window: usize },

    #[error("upsampling from {from} Hz to {to} Hz is not supported")]
    Upsampling { from: u32, to: u32 },

    #[error("unsupported wav format: {0}")]
    UnsupportedFormat(String),

    #[error("wav error in {path}: {source}")]
    Wav {
        path: PathBuf,
        #[source]
        source: hound::Error,
    },

    #[error("degenerate reference signal {0} (all zero)")]
    DegenerateReference(usize),

    #[error("training diverged at epoch {epoch}: objective is {value}")]
    Divergence { epoch: usize, value: f64 },

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("checkpoint checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    Checksum { stored: u32, computed: u32 },

    #[error("config: {0}")]
    Config(String),

    #[error("dataset: {0}")]
    Dataset(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable tag for the structured CLI error line.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ShapeMismatch { .. } => "shape",
            Error::EmptyInput(_) => "empty",
            Error::InvalidParameter(_) => "parameter",
            Error::NonFinite(_) => "non-finite",
            Error::OutOfRange { .. } => "range",
            Error::SignalTooShort { .. } => "signal",
            Error::Upsampling { .. } => "resample",
            Error::UnsupportedFormat(_) | Error::Wav { .. } => "wav",
            Error::DegenerateReference(_) => "reference",
            Error::Divergence { .. } => "divergence",
            Error::Checkpoint(_) | Error::Checksum { .. } => "checkpoint",
            Error::Config(_) => "config",
            Error::Dataset(_) => "dataset",
            Error::Io { .. } => "io",
        }
    }
}

pub(crate) fn check_shape(op: &'static str, left: (usize, usize), right: (usize, usize)) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::ShapeMismatch { op, left, right })
    }
}
