use thiserror::Error;

/// Errors raised by the library.
///
/// Builders report failed stage conditions through certificates, not through
/// this type; an `Error` means the operation itself could not complete.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} needs {needed} bytes but the memory budget is {budget} bytes (override with TPNT_MEMORY_BUDGET)")]
    Resource {
        what: String,
        needed: u64,
        budget: u64,
    },

    #[error("{what} = {value} exceeds the sieved limit {limit}")]
    OutOfRange {
        what: &'static str,
        value: u64,
        limit: u64,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("budget exhausted at stage {stage}: no admissible k within modulus budget {budget} (last failing condition: {condition})")]
    BudgetExhausted {
        stage: usize,
        budget: u64,
        condition: String,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable machine-readable tag for error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Resource { .. } => "resource",
            Error::OutOfRange { .. } => "out_of_range",
            Error::Contract(_) => "contract",
            Error::Precondition(_) => "precondition",
            Error::Overflow(_) => "overflow",
            Error::BudgetExhausted { .. } => "budget_exhausted",
            Error::Invariant(_) => "invariant",
            Error::Config(_) => "config",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
