//! Follow the Best Price: under full feedback, post a maximizer of the
//! empirical gain from trade over all pairs seen so far.

use rand::RngCore;

use super::interval_index::{IntervalIndex, NaiveIntervalIndex, OpCounter};
use super::{expect_kind, no_pending, Strategy};
use crate::error::Result;
use crate::exact::GainUnits;
use crate::types::{Feedback, FeedbackKind, Posting, Price, ValuationPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IndexMode {
    /// `O(log t)` amortized per round.
    #[default]
    Tree,
    /// `O(t)` per round; kept as a cross-check.
    Naive,
}

#[derive(Debug, Clone)]
enum Index {
    Tree(IntervalIndex),
    Naive(NaiveIntervalIndex),
}

/// The first price is 1/2. Afterwards the price is the seller valuation
/// `S_i` with the smallest `i` among those maximizing the empirical sum.
#[derive(Debug, Clone)]
pub struct Fbp {
    observed: Vec<ValuationPair>,
    index: Index,
    current: Price,
    pending: bool,
}

impl Default for Fbp {
    fn default() -> Self {
        Self::new()
    }
}

impl Fbp {
    pub fn new() -> Self {
        Self::with_mode(IndexMode::Tree)
    }

    pub fn with_mode(mode: IndexMode) -> Self {
        let index = match mode {
            IndexMode::Tree => Index::Tree(IntervalIndex::new()),
            IndexMode::Naive => Index::Naive(NaiveIntervalIndex::new()),
        };
        Fbp {
            observed: Vec::new(),
            index,
            current: Price::HALF,
            pending: false,
        }
    }

    pub fn observed(&self) -> &[ValuationPair] {
        &self.observed
    }

    pub fn current_price(&self) -> Price {
        self.current
    }

    /// Exact empirical gain-from-trade sum at the current price.
    pub fn best_total(&self) -> GainUnits {
        self.argmax().map_or(GainUnits::ZERO, |(_, v)| v)
    }

    pub fn ops(&self) -> OpCounter {
        match &self.index {
            Index::Tree(t) => t.ops(),
            Index::Naive(n) => n.ops(),
        }
    }

    fn argmax(&self) -> Option<(u32, GainUnits)> {
        match &self.index {
            Index::Tree(t) => t.argmax(),
            Index::Naive(n) => n.argmax(),
        }
    }

    /// Feeds one revealed pair directly, bypassing the post/observe cycle.
    pub fn push(&mut self, v: ValuationPair) {
        let w = GainUnits::of_pair(v.s, v.b);
        match &mut self.index {
            Index::Tree(t) => t.push_interval(v.s, v.b, w),
            Index::Naive(n) => n.push_interval(v.s, v.b, w),
        };
        self.observed.push(v);
        let (i, _) = self.argmax().expect("non-empty after push");
        self.current = Price::saturating(self.observed[i as usize].s);
    }
}

impl Strategy for Fbp {
    fn name(&self) -> &str {
        "fbp"
    }

    fn required_feedback(&self) -> FeedbackKind {
        FeedbackKind::Full
    }

    fn post(&mut self, _rng: &mut dyn RngCore) -> Posting {
        self.pending = true;
        Posting::Single(self.current)
    }

    fn observe(&mut self, feedback: &Feedback) -> Result<()> {
        expect_kind(FeedbackKind::Full, feedback)?;
        if !self.pending {
            return Err(no_pending());
        }
        self.pending = false;
        let Feedback::Full { s, b } = *feedback else { unreachable!() };
        self.push(ValuationPair::new(s, b)?);
        Ok(())
    }

    fn snapshot(&self) -> Box<dyn Strategy> {
        Box::new(self.clone())
    }

    fn is_deterministic(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(s: f64, b: f64) -> ValuationPair {
        ValuationPair::new(s, b).unwrap()
    }

    #[test]
    fn first_price_is_half() {
        let mut f = Fbp::new();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(f.post(&mut rng), Posting::Single(Price::HALF));
    }

    #[test]
    fn hand_examples() {
        let mut f = Fbp::new();
        f.push(v(0.2, 0.8));
        f.push(v(0.5, 0.6));
        assert_eq!(f.current_price().value(), 0.5);
        assert!((f.best_total().to_f64() - 0.7).abs() < 1e-15);

        let mut f = Fbp::new();
        f.push(v(0.3, 0.3));
        assert_eq!(f.current_price().value(), 0.3);
    }

    #[test]
    fn tree_and_naive_post_identical_prices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut a = Fbp::with_mode(IndexMode::Tree);
        let mut b = Fbp::with_mode(IndexMode::Naive);
        for _ in 0..2000 {
            let p = v(rng.gen(), rng.gen());
            a.push(p);
            b.push(p);
            assert_eq!(a.current_price(), b.current_price());
            assert_eq!(a.best_total(), b.best_total());
        }
    }

    #[test]
    fn observe_requires_post() {
        let mut f = Fbp::new();
        assert!(f.observe(&Feedback::Full { s: 0.1, b: 0.2 }).is_err());
    }
}
