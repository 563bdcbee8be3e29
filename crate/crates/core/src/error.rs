use crate::types::FeedbackKind;

/// Errors raised by the library.
///
/// Most variants are contract violations (a caller passed something that a
/// constructor or state machine cannot accept); none of them are recoverable
/// mid-episode.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("price {0} outside [0, 1]")]
    PriceOutOfRange(f64),

    #[error("valuation ({s}, {b}) outside [0, 1]^2")]
    ValuationOutOfRange { s: f64, b: f64 },

    #[error("price pair ({p}, {p_prime}) violates p <= p'")]
    InvertedPricePair { p: f64, p_prime: f64 },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("feedback mismatch: strategy requires {expected:?}, got {got:?}")]
    FeedbackMismatch {
        expected: FeedbackKind,
        got: FeedbackKind,
    },

    #[error("protocol violation: {0}")]
    Protocol(String),

    #[error("reward {0} outside [0, 1]")]
    RewardOutOfRange(f64),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("regression needs at least 3 positive points, got {0}")]
    TooFewPoints(usize),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
