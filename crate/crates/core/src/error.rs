use thiserror::Error;

/// Location-tagged syntax error from the polynomial / expression parser.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("gcd(0, 0) is undefined")]
    ZeroGcd,

    #[error("numeric evaluation failed: {0}")]
    Evaluation(String),

    #[error("parse error: {0}")]
    Parse(#[from] ParseError),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not unimodular: {0}")]
    NotUnimodular(String),

    #[error("lattice matrix is singular")]
    SingularLattice,

    #[error("mode not controllable: {0}")]
    NotControllable(String),

    /// The constant-rank and torsion decisions disagreed. This can only be a
    /// bug in the arithmetic stack; it is never reported as a verdict.
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("invalid config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
