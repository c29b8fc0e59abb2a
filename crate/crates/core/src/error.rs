use thiserror::Error;

/// Errors raised by the library. Every variant carries a human-readable detail.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("capacity exceeded: {0}")]
    CapacityExceeded(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("numerical budget exceeded: {0}")]
    NumericalBudgetExceeded(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("the two curves are identical")]
    IdenticalCurves,
    #[error("degenerate position: {0}")]
    DegeneratePosition(String),
    #[error("empty after pruning: {0}")]
    EmptyAfterPruning(String),
    #[error("no cover: {0}")]
    NoCover(String),
    #[error("stall detected: {0}")]
    StallDetected(String),
    #[error("contract violation: {0}")]
    ContractViolation(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::InvalidInput(_) => "InvalidInput",
            Error::CapacityExceeded(_) => "CapacityExceeded",
            Error::DegenerateInput(_) => "DegenerateInput",
            Error::Unsupported(_) => "Unsupported",
            Error::NumericalBudgetExceeded(_) => "NumericalBudgetExceeded",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::IdenticalCurves => "IdenticalCurves",
            Error::DegeneratePosition(_) => "DegeneratePosition",
            Error::EmptyAfterPruning(_) => "EmptyAfterPruning",
            Error::NoCover(_) => "NoCover",
            Error::StallDetected(_) => "StallDetected",
            Error::ContractViolation(_) => "ContractViolation",
            Error::Parse(_) => "Parse",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
