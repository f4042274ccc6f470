use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),
    #[error("stencil exceeds grid: {0}")]
    StencilExceedsGrid(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("volatility not positive: {0}")]
    Positivity(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("not hermitian: residual {0:e}")]
    NotHermitian(f64),
    #[error("stability guard violated: {0}")]
    Stability(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("evolution failed: {0}")]
    Evolution(String),
    #[error("insufficient w-domain: {0}")]
    InsufficientDomain(String),
    #[error("no positive-momentum support: P_succ = {0:e}")]
    NoPositiveSupport(f64),
    #[error("uniform-overlap underflow: F1 = {0:e}")]
    UniformOverlapUnderflow(f64),
    #[error("clock wavepacket dispersed: localization mass {0}")]
    ClockDispersed(f64),
    #[error("buffer violation: {0}")]
    Buffer(String),
    #[error("inputs not normalized: {0}")]
    NotNormalized(String),
    #[error("{path}: {msg}")]
    Config { path: String, msg: String },
}

impl Error {
    pub fn config(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config { path: path.into(), msg: msg.into() }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } => 1,
            Error::NoPositiveSupport(_) | Error::UniformOverlapUnderflow(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
