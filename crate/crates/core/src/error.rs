use thiserror::Error;

use crate::index::IndexTuple;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index tuple must contain at least one lag")]
    EmptyTuple,
    #[error("cannot parse index tuple {0:?}")]
    ParseTuple(String),
    #[error("tuple {0} has a negative lag")]
    NegativeLag(IndexTuple),

    #[error("times and values differ in length ({times} vs {values})")]
    LengthMismatch { times: usize, values: usize },
    #[error("series is empty")]
    EmptySeries,
    #[error("times must be strictly increasing and non-negative (index {0})")]
    NonMonotoneTimes(usize),
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("horizon must be positive and finite, got {0}")]
    BadHorizon(f64),
    #[error("regular spacing must be positive and finite, got {0}")]
    BadSpacing(f64),
    #[error("regular-grid regime requires equally spaced times with known spacing")]
    RegimeMismatch,

    #[error("block index {index} + k_n {k_n} exceeds series length {len}")]
    OutOfRange { index: usize, k_n: usize, len: usize },
    #[error("invalid windows: {0}")]
    InvalidWindows(String),
    #[error("no observations within the horizon (N_n(T) = 0)")]
    NoObservations,
    #[error("series too short: no summands for {0}")]
    EmptySum(IndexTuple),
    #[error("zero denominator in ratio estimator")]
    ZeroDenominator,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("tuple of length {0} exceeds the pairing enumeration bound")]
    EnumerationBound(usize),
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("latent data absent from path")]
    MissingLatent,
    #[error("empty sample")]
    EmptySample,

    #[error("i/o error: {0}")]
    Io(String),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("input contains no observations")]
    EmptyInput,
}

pub type Result<T> = std::result::Result<T, Error>;
