use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library and surfaced by the CLI.
#[derive(Debug, Error)]
pub enum Error {
    /// A requested length or index is zero, or exceeds a hard cap.
    #[error("size error: {0}")]
    Size(String),

    /// An argument lies outside the domain where the formula is valid.
    #[error("domain error: {0}")]
    Domain(String),

    /// The Gaussian input is shorter than the computation needs.
    #[error("missing input: need X(1..={needed}) but only {available} values are present")]
    MissingInput { needed: usize, available: usize },

    /// A block schedule whose magnitudes exceed the configured budget.
    #[error("scale error: 2^{log2_magnitude:.3} exceeds the budget of 2^{budget_log2}")]
    Scale { log2_magnitude: f64, budget_log2: u32 },

    /// exp() overflowed while sampling a generating function.
    #[error("non-finite sample: {0}")]
    NonFinite(String),

    #[error("unsupported constraint: {0}")]
    UnsupportedConstraint(String),

    /// A process or sequence broke the contract a check depends on.
    #[error("contract error: {0}")]
    Contract(String),

    /// A campaign whose work or memory exceeds the configured budget.
    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serialize(String),
}

impl Error {
    /// Process exit code used by the `rmc` binary.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Scale { .. } | Error::Budget(_) => 3,
            Error::Contract(_) => 1,
            _ => 2,
        }
    }

    /// An I/O error tagged with the path it concerns.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
