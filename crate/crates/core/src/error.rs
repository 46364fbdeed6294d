use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("empty alphabet")]
    EmptyAlphabet,

    #[error("invalid probability {value} at index {index}")]
    InvalidProbability { index: usize, value: f64 },

    #[error("probabilities sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },

    #[error("row {row} of channel: {source}")]
    InvalidRow {
        row: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{what} has zero mass at symbol {index}; full support is required")]
    SupportViolation { what: &'static str, index: usize },

    #[error("symbol {symbol} outside alphabet of size {alphabet_size}")]
    SymbolOutOfRange { symbol: usize, alphabet_size: usize },

    #[error("invalid rate {0}: rates must be finite and non-negative")]
    InvalidRate(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} requires {required} items, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        required: f64,
        cap: f64,
    },

    #[error("no feasible conditional distribution attains level {level}")]
    InfeasibleLevel { level: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
