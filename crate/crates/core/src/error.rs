use thiserror::Error;

/// Errors produced by the library and surfaced by the CLI.
#[derive(Debug, Error)]
pub enum Error {
    /// Input rejected before any computation (e.g. `q` not a prime power).
    #[error("{0}")]
    Validation(String),

    /// Argument outside the domain of a function (e.g. `x >= q` for `h_q`).
    #[error("{0}")]
    Domain(String),

    /// A size cap was exceeded.
    #[error("{0}")]
    Resource(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialize(String),
}

impl Error {
    pub(crate) fn not_prime_power(q: u64) -> Self {
        Error::Validation(format!("q must be a prime power (got {q})"))
    }

    /// Process exit code for this error: 2 for resource caps, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resource(_) => 2,
            _ => 1,
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Serialize(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialize(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
