use thiserror::Error;

/// Errors produced by model construction, evaluation and analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("amplitude {0} outside [-1, 1]")]
    Domain(f64),

    #[error("transform size {size} for multiplier {p}/{q} exceeds the cap of {cap} points")]
    Resource { p: u64, q: u64, size: u128, cap: usize },

    #[error("operation not supported for model '{0}'")]
    UnsupportedModel(&'static str),

    #[error("fundamental amplitude is zero; THD is undefined")]
    DegenerateSignal,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
