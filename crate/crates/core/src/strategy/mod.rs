//! Learners.
//!
//! A [`Strategy`] alternates `post` and `observe`. It only ever sees the
//! feedback variant it declares in [`Strategy::required_feedback`]; any
//! other variant is rejected, which is how the information barrier of each
//! feedback model is enforced.

use rand::RngCore;

use crate::error::{Error, Result};
use crate::types::{make_feedback_wbb, Feedback, FeedbackKind, Posting, ValuationPair};

pub mod bandit;
pub mod baselines;
pub mod doubling;
pub mod fbp;
pub mod interval_index;
pub mod scouting_bandits;
pub mod scouting_blindits;
pub mod tuning;

pub use bandit::{BanditCore, Moss};
pub use baselines::{FixedPrice, MedianMechanism, SingleSample, UniformRandom};
pub use doubling::Doubling;
pub use fbp::{Fbp, IndexMode};
pub use interval_index::{IntervalIndex, NaiveIntervalIndex, OpCounter};
pub use scouting_bandits::ScoutingBandits;
pub use scouting_blindits::ScoutingBlindits;

pub trait Strategy: Send {
    fn name(&self) -> &str;

    fn required_feedback(&self) -> FeedbackKind;

    /// The posting for the next round. Only the strategy's own state and
    /// `rng` may influence it.
    fn post(&mut self, rng: &mut dyn RngCore) -> Posting;

    /// Feedback for the most recent posting.
    fn observe(&mut self, feedback: &Feedback) -> Result<()>;

    /// Deep copy; the copy behaves identically given identical inputs.
    fn snapshot(&self) -> Box<dyn Strategy>;

    /// True when `post` never consumes randomness.
    fn is_deterministic(&self) -> bool {
        false
    }
}

impl Clone for Box<dyn Strategy> {
    fn clone(&self) -> Self {
        self.snapshot()
    }
}

pub(crate) fn expect_kind(expected: FeedbackKind, feedback: &Feedback) -> Result<()> {
    if feedback.kind() == expected {
        Ok(())
    } else {
        Err(Error::FeedbackMismatch {
            expected,
            got: feedback.kind(),
        })
    }
}

pub(crate) fn no_pending() -> Error {
    Error::Protocol("observe called without a preceding post".into())
}

/// Presents a strategy with a coarser feedback model as a full-feedback
/// strategy: revealed valuations are reduced to exactly what the inner
/// strategy would have seen.
pub struct FullFeedbackAdapter {
    inner: Box<dyn Strategy>,
    last: Option<Posting>,
    name: String,
}

impl FullFeedbackAdapter {
    pub fn new(inner: Box<dyn Strategy>) -> Self {
        let name = format!("{}+full", inner.name());
        FullFeedbackAdapter { inner, last: None, name }
    }
}

impl Strategy for FullFeedbackAdapter {
    fn name(&self) -> &str {
        &self.name
    }

    fn required_feedback(&self) -> FeedbackKind {
        FeedbackKind::Full
    }

    fn post(&mut self, rng: &mut dyn RngCore) -> Posting {
        let p = self.inner.post(rng);
        self.last = Some(p);
        p
    }

    fn observe(&mut self, feedback: &Feedback) -> Result<()> {
        expect_kind(FeedbackKind::Full, feedback)?;
        let posting = self.last.take().ok_or_else(no_pending)?;
        let Feedback::Full { s, b } = *feedback else { unreachable!() };
        let reduced = make_feedback_wbb(self.inner.required_feedback(), posting.as_pair(), ValuationPair::new(s, b)?);
        self.inner.observe(&reduced)
    }

    fn is_deterministic(&self) -> bool {
        self.inner.is_deterministic()
    }

    fn snapshot(&self) -> Box<dyn Strategy> {
        Box::new(FullFeedbackAdapter {
            inner: self.inner.snapshot(),
            last: self.last,
            name: self.name.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Price;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn adapter_reduces_full_feedback() {
        let inner = ScoutingBandits::new(4, 1, Box::new(Moss::new(1, 10).unwrap())).unwrap();
        let mut a = FullFeedbackAdapter::new(Box::new(inner));
        assert_eq!(a.required_feedback(), FeedbackKind::Full);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        a.post(&mut rng);
        a.observe(&Feedback::Full { s: 0.1, b: 0.9 }).unwrap();
        assert!(a.observe(&Feedback::Full { s: 0.1, b: 0.9 }).is_err());
        a.post(&mut rng);
        assert!(matches!(
            a.observe(&Feedback::TradeBit { traded: true }),
            Err(Error::FeedbackMismatch { .. })
        ));
    }

    #[test]
    fn snapshot_replays_identically() {
        use crate::env::uniform_iid;
        use crate::types::make_feedback_wbb;
        use rand::Rng;
        let env = uniform_iid();
        let all: Vec<Box<dyn Strategy>> = vec![
            Box::new(Fbp::new()),
            Box::new(ScoutingBandits::auto(200).unwrap()),
            Box::new(ScoutingBlindits::new(3, 4).unwrap()),
            Box::new(SingleSample::new()),
            Box::new(UniformRandom::new()),
        ];
        for mut s in all {
            let mut env_rng = ChaCha8Rng::seed_from_u64(21);
            let mut rng = ChaCha8Rng::seed_from_u64(22);
            let drive = |s: &mut Box<dyn Strategy>, rng: &mut ChaCha8Rng, env_rng: &mut ChaCha8Rng| {
                let p = s.post(rng);
                let v = env.sample(env_rng);
                s.observe(&make_feedback_wbb(s.required_feedback(), p.as_pair(), v)).unwrap();
                p
            };
            for _ in 0..50 {
                drive(&mut s, &mut rng, &mut env_rng);
            }
            let mut copy = s.snapshot();
            let seed: u64 = rng.gen();
            let (mut r1, mut r2) = (ChaCha8Rng::seed_from_u64(seed), ChaCha8Rng::seed_from_u64(seed));
            let (mut e1, mut e2) = (env_rng.clone(), env_rng);
            for _ in 0..150 {
                assert_eq!(drive(&mut s, &mut r1, &mut e1), drive(&mut copy, &mut r2, &mut e2), "{}", s.name());
            }
        }
    }

    #[test]
    fn every_strategy_rejects_foreign_feedback() {
        let all: Vec<Box<dyn Strategy>> = vec![
            Box::new(Fbp::new()),
            Box::new(ScoutingBandits::new(4, 2, Box::new(Moss::new(2, 10).unwrap())).unwrap()),
            Box::new(ScoutingBlindits::new(3, 2).unwrap()),
            Box::new(FixedPrice::new(Price::HALF)),
            Box::new(MedianMechanism::new(Price::HALF)),
            Box::new(SingleSample::new()),
            Box::new(UniformRandom::new()),
        ];
        let variants = [
            Feedback::Full { s: 0.2, b: 0.7 },
            Feedback::Realistic { seller_accepts: true, buyer_accepts: false },
            Feedback::TradeBit { traded: true },
            Feedback::None,
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for s in all {
            for fb in variants {
                let mut probe = s.snapshot();
                probe.post(&mut rng);
                let r = probe.observe(&fb);
                if fb.kind() == s.required_feedback() {
                    assert!(r.is_ok(), "{} rejected its own feedback", s.name());
                } else {
                    assert!(
                        matches!(r, Err(Error::FeedbackMismatch { .. })),
                        "{} accepted {:?}",
                        s.name(),
                        fb.kind()
                    );
                }
            }
        }
    }
}
