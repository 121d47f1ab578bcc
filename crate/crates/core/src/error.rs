use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The operation is not defined for this family or dimension.
    #[error("unsupported: {0}")]
    Capability(String),

    /// The input carries no information for the requested quantity
    /// (e.g. a constant column).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("fit failed: {message} ({diagnostics})")]
    Fit {
        message: String,
        diagnostics: String,
    },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn capability(msg: impl Into<String>) -> Self {
        Error::Capability(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Capability(_) => 2,
            Error::Parse { .. } | Error::Io(_) | Error::Domain(_) => 3,
            Error::Degenerate(_) | Error::Fit { .. } => 4,
        }
    }
}
