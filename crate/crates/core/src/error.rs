use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("no flanking minima around the central maximum")]
    NoFlankingMinima,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }

    /// Process exit code for this error: 2 for bad input, 3 for numerical trouble.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NoFlankingMinima | Error::Numerical(_) => 3,
            _ => 2,
        }
    }
}
