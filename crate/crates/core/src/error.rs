use thiserror::Error;

/// Errors raised by the model, the solver and the tooling around them.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum RapError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("shape mismatch: expected {expected} variables, got {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: matrix has {expected} columns, vector has {found} entries")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("problem is infeasible: reliability of the full configuration is {max_reliability} < {required}")]
    Infeasible { max_reliability: f64, required: f64 },

    #[error("subsystem {subsystem} has no component with a positive upper bound")]
    EmptySubsystemBound { subsystem: usize },

    #[error("budget {budget} is below the cheapest non-empty configuration cost {required}")]
    BudgetTooSmall { required: i64, budget: i64 },

    #[error("budget c0 has not been set on the normalized instance")]
    BudgetUnset,

    #[error("subsystem {subsystem} is not sorted by descending cost")]
    NotNormalized { subsystem: usize },

    #[error("enumeration of {size} points exceeds the limit of {limit}")]
    EnumerationTooLarge { size: u128, limit: u128 },

    #[error("search counter overflow")]
    CounterOverflow,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for RapError {
    fn from(e: std::io::Error) -> Self {
        RapError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, RapError>;
