use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated an operation's precondition.
    #[error("invalid argument: {0}")]
    Validation(String),

    /// A point set would exceed the configured point cap.
    #[error("capacity exceeded: {requested} points requested, cap is {cap}")]
    Capacity { requested: u128, cap: usize },

    /// The requested computation does not fit in the configured work budget.
    #[error("{what} infeasible: estimated work {work:.3e} exceeds budget {budget:.3e}; {hint}")]
    Infeasible {
        what: &'static str,
        work: f64,
        budget: f64,
        hint: &'static str,
    },

    /// A formula was evaluated outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A bound was requested outside the parameter range where it is proven.
    #[error("range error: {0}")]
    Range(String),

    /// Malformed textual input. `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
