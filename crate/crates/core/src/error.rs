use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("mode {mode}: step-doubling disagreement {relative:.3e} exceeds tolerance; increase n_radial (currently {n_radial})")]
    StepInstability {
        mode: i64,
        relative: f64,
        n_radial: usize,
    },

    #[error("mode {mode}: resonant boundary solve (|det|/scale = {relative:.3e})")]
    Resonance { mode: i64, relative: f64 },

    #[error("mode {mode} is beyond the grid Nyquist bound {nyquist}")]
    BeyondNyquist { mode: i64, nyquist: i64 },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
