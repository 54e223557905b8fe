use chrono::NaiveDate;
use thiserror::Error;

/// Errors raised by the analysis library.
///
/// Row numbers refer to physical lines of the input file, with the header on line 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("row {row}: price `{value}` is not a finite number")]
    NonNumericPrice { row: usize, value: String },

    #[error("row {row}: price {value} is not positive")]
    NonPositivePrice { row: usize, value: f64 },

    #[error("row {row}: duplicate date {date}")]
    DuplicateDate { row: usize, date: NaiveDate },

    #[error("row {row}: invalid date `{value}` (expected YYYY-MM-DD)")]
    InvalidDate { row: usize, value: String },

    #[error("row {row}: empty event label")]
    EmptyLabel { row: usize },

    #[error("price series has {len} rows, need at least 2")]
    TooShort { len: usize },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("thresholds must be strictly increasing")]
    NonMonotoneThresholds,

    #[error("thresholds must be finite")]
    NonFiniteThreshold,

    #[error("expected {expected} thresholds, got {got}")]
    ThresholdCount { expected: usize, got: usize },

    #[error("unsupported alphabet half-cardinality {0} (must be 1..={max})", max = crate::quantize::MAX_HALF_CARDINALITY)]
    InvalidAlphabetSize(usize),

    #[error("returns are too degenerate to build strictly increasing thresholds")]
    DegenerateReturns,

    #[error("series is empty")]
    EmptySeries,

    #[error("letter `{0}` is not in the alphabet")]
    ForeignLetter(char),

    #[error("text of length {len} is too short for thickness {n}")]
    TextTooShort { len: usize, n: usize },

    #[error("dictionary thickness mismatch: {left} vs {right}")]
    ThicknessMismatch { left: usize, right: usize },

    #[error("n-gram `{0}` has no lifted frequency")]
    SupportMismatch(String),

    #[error("n-gram `{0}` occurs a different number of times in the text than the dictionary records")]
    TextMismatch(String),

    #[error("no n-gram of the dictionary has a continuation, lift is empty")]
    EmptyLift,

    #[error("texts use different alphabets")]
    AlphabetMismatch,

    #[error("invalid letter distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("noise statistics do not cover thickness {0}")]
    MissingNoiseStats(usize),

    #[error("no n-gram satisfies the selection criterion")]
    EmptySelection,

    #[error("text carries no dates")]
    NoDates,

    #[error("series has zero variance")]
    ZeroVariance,

    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}

impl Error {
    /// True for errors that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::InvariantViolation(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
