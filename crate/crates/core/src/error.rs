use thiserror::Error;

/// Errors raised by the simulator and its verification harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point {x} lies outside the effective domain of {graph}")]
    OutsideDomain { graph: String, x: f64 },

    #[error("non-finite input {0}")]
    NonFinite(f64),

    #[error("root finder did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("numerical blow-up at t = {t}: norm {norm:e} exceeds ceiling")]
    BlowUp { t: f64, norm: f64 },

    #[error("step size underflow at t = {t} after repeated rejections")]
    StepRejection { t: f64 },

    #[error("config error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Config { line: Option<usize>, message: String },

    #[error("io error: {0}")]
    Io(String),

    #[error("sweep member {label} failed: {source}")]
    Member { label: String, source: Box<Error> },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config {
            line: None,
            message: msg.into(),
        }
    }
}

impl Error {
    /// The innermost error, looking through [`Error::Member`].
    pub fn root(&self) -> &Error {
        match self {
            Error::Member { source, .. } => source.root(),
            other => other,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
