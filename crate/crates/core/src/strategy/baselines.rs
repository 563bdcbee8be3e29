//! Reference mechanisms that do not learn, or learn trivially.

use rand::{Rng, RngCore};

use super::{expect_kind, no_pending, Strategy};
use crate::error::Result;
use crate::types::{Feedback, FeedbackKind, Posting, Price};

/// Posts the same price forever.
#[derive(Debug, Clone)]
pub struct FixedPrice {
    price: Price,
    pending: bool,
    name: &'static str,
}

impl FixedPrice {
    pub fn new(price: Price) -> Self {
        FixedPrice {
            price,
            pending: false,
            name: "fixed_price",
        }
    }
}

impl Strategy for FixedPrice {
    fn name(&self) -> &str {
        self.name
    }

    fn required_feedback(&self) -> FeedbackKind {
        FeedbackKind::None
    }

    fn post(&mut self, _rng: &mut dyn RngCore) -> Posting {
        self.pending = true;
        Posting::Single(self.price)
    }

    fn observe(&mut self, feedback: &Feedback) -> Result<()> {
        expect_kind(FeedbackKind::None, feedback)?;
        if !std::mem::take(&mut self.pending) {
            return Err(no_pending());
        }
        Ok(())
    }

    fn snapshot(&self) -> Box<dyn Strategy> {
        Box::new(self.clone())
    }

    fn is_deterministic(&self) -> bool {
        true
    }
}

/// Posts the seller's median, known in advance.
#[derive(Debug, Clone)]
pub struct MedianMechanism(FixedPrice);

impl MedianMechanism {
    pub fn new(seller_median: Price) -> Self {
        MedianMechanism(FixedPrice {
            name: "median_mechanism",
            ..FixedPrice::new(seller_median)
        })
    }
}

impl Strategy for MedianMechanism {
    fn name(&self) -> &str {
        self.0.name()
    }

    fn required_feedback(&self) -> FeedbackKind {
        self.0.required_feedback()
    }

    fn post(&mut self, rng: &mut dyn RngCore) -> Posting {
        self.0.post(rng)
    }

    fn observe(&mut self, feedback: &Feedback) -> Result<()> {
        self.0.observe(feedback)
    }

    fn snapshot(&self) -> Box<dyn Strategy> {
        Box::new(self.clone())
    }

    fn is_deterministic(&self) -> bool {
        true
    }
}

/// Posts 1/2 first, then the seller valuation revealed in the previous
/// round.
#[derive(Debug, Clone)]
pub struct SingleSample {
    next: Price,
    pending: bool,
}

impl Default for SingleSample {
    fn default() -> Self {
        Self::new()
    }
}

impl SingleSample {
    pub fn new() -> Self {
        SingleSample {
            next: Price::HALF,
            pending: false,
        }
    }
}

impl Strategy for SingleSample {
    fn name(&self) -> &str {
        "single_sample"
    }

    fn required_feedback(&self) -> FeedbackKind {
        FeedbackKind::Full
    }

    fn post(&mut self, _rng: &mut dyn RngCore) -> Posting {
        self.pending = true;
        Posting::Single(self.next)
    }

    fn observe(&mut self, feedback: &Feedback) -> Result<()> {
        expect_kind(FeedbackKind::Full, feedback)?;
        if !std::mem::take(&mut self.pending) {
            return Err(no_pending());
        }
        if let Feedback::Full { s, .. } = *feedback {
            self.next = Price::new(s)?;
        }
        Ok(())
    }

    fn snapshot(&self) -> Box<dyn Strategy> {
        Box::new(self.clone())
    }

    fn is_deterministic(&self) -> bool {
        true
    }
}

/// Posts an independent `U[0, 1]` price each round.
#[derive(Debug, Clone, Default)]
pub struct UniformRandom {
    pending: bool,
}

impl UniformRandom {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Strategy for UniformRandom {
    fn name(&self) -> &str {
        "uniform_random"
    }

    fn required_feedback(&self) -> FeedbackKind {
        FeedbackKind::None
    }

    fn post(&mut self, rng: &mut dyn RngCore) -> Posting {
        self.pending = true;
        Posting::Single(Price::saturating(rng.gen()))
    }

    fn observe(&mut self, feedback: &Feedback) -> Result<()> {
        expect_kind(FeedbackKind::None, feedback)?;
        if !std::mem::take(&mut self.pending) {
            return Err(no_pending());
        }
        Ok(())
    }

    fn snapshot(&self) -> Box<dyn Strategy> {
        Box::new(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fixed_price_never_moves() {
        let mut f = FixedPrice::new(Price::HALF);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..10 {
            assert_eq!(f.post(&mut rng), Posting::Single(Price::HALF));
            f.observe(&Feedback::None).unwrap();
        }
    }

    #[test]
    fn single_sample_follows_previous_seller() {
        let mut s = SingleSample::new();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(s.post(&mut rng), Posting::Single(Price::HALF));
        s.observe(&Feedback::Full { s: 0.01, b: 1.0 }).unwrap();
        assert_eq!(s.post(&mut rng), Posting::Single(Price::new(0.01).unwrap()));
    }
}
