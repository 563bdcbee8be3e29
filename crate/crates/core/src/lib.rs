//! Regret minimization for sequential bilateral trade.
//!
//! A seller and a buyer arrive each round with private valuations; the
//! learner posts a price (or a pair of prices) and collects the gain from
//! trade when both accept. This crate provides the learners, the stochastic
//! and adversarial environments that stress them, exact and brute-force
//! oracles for the expected gain from trade, and a replicated experiment
//! harness that measures regret.

// `!(x >= 0.0)` style checks are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adversary;
pub mod env;
pub mod error;
pub mod exact;
pub mod harness;
pub mod oracle;
pub mod parallel;
pub mod strategy;
pub mod types;
pub mod verify;

pub use error::{Error, Result};
pub use types::{
    gft, gft_wbb, make_feedback, make_feedback_wbb, Feedback, FeedbackKind, Posting, Price, PricePairWBB,
    ValuationPair,
};
