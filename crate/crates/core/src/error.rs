use thiserror::Error;

/// Errors raised by model construction, evaluation, solvers and file I/O.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid alternative {id}: {reason}")]
    InvalidAlternative { id: u32, reason: String },

    #[error("invalid assortment: {0}")]
    InvalidAssortment(String),

    #[error("invalid consumer type: {0}")]
    InvalidType(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid choice table: {0}")]
    InvalidTable(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid ranking: {0}")]
    InvalidRanking(String),

    #[error("invalid revenue function: {0}")]
    InvalidRevenue(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{what} of {size} exceeds the configured cap of {cap}")]
    CapExceeded {
        what: String,
        size: usize,
        cap: usize,
    },

    #[error("{context}: {message}")]
    Parse { context: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
