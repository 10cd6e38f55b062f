use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("non-finite value in field component {component} at index {index}")]
    NonFinite { component: usize, index: usize },

    #[error("invalid exponent p = {0}")]
    InvalidExponent(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("negative time t = {0}")]
    NegativeTime(f64),

    #[error("noise channel {channel} out of range (model has {count})")]
    ChannelOutOfRange { channel: usize, count: usize },

    #[error("time t = {0} is not a node of the path grid")]
    OffGrid(f64),

    #[error("time grid must be strictly increasing from 0: {0}")]
    InvalidTimeGrid(String),

    #[error("snapshot format: {0}")]
    Snapshot(String),

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("smallness condition refused: {0}")]
    SmallnessRefused(String),

    #[error("{0}")]
    NonConvergence(Box<crate::solver::NonConvergence>),

    #[error("time stepper blow-up at step {step} (norm growth {growth:.3e})")]
    BlowUp { step: usize, growth: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
