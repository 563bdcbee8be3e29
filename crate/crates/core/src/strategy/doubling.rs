//! Doubling trick for horizon-tuned strategies: epoch `j` lasts `2^j`
//! rounds and runs a fresh instance tuned for that length.

use std::sync::Arc;

use rand::RngCore;

use super::Strategy;
use crate::error::Result;
use crate::types::{Feedback, FeedbackKind, Posting};

pub type StrategyFactory = Arc<dyn Fn(u64) -> Result<Box<dyn Strategy>> + Send + Sync>;

pub struct Doubling {
    factory: StrategyFactory,
    inner: Box<dyn Strategy>,
    epoch_len: u64,
    used: u64,
    name: String,
}

impl Doubling {
    pub fn new(factory: StrategyFactory) -> Result<Self> {
        let inner = factory(1)?;
        let name = format!("doubling({})", inner.name());
        Ok(Doubling {
            factory,
            inner,
            epoch_len: 1,
            used: 0,
            name,
        })
    }

    pub fn epoch_len(&self) -> u64 {
        self.epoch_len
    }
}

impl Strategy for Doubling {
    fn name(&self) -> &str {
        &self.name
    }

    fn required_feedback(&self) -> FeedbackKind {
        self.inner.required_feedback()
    }

    fn post(&mut self, rng: &mut dyn RngCore) -> Posting {
        if self.used == self.epoch_len {
            self.epoch_len *= 2;
            self.used = 0;
            // The factory already produced a valid instance at a smaller
            // length, so a failure here is a factory bug.
            self.inner = (self.factory)(self.epoch_len).expect("strategy factory failed on a larger horizon");
        }
        self.used += 1;
        self.inner.post(rng)
    }

    fn observe(&mut self, feedback: &Feedback) -> Result<()> {
        self.inner.observe(feedback)
    }

    fn is_deterministic(&self) -> bool {
        self.inner.is_deterministic()
    }

    fn snapshot(&self) -> Box<dyn Strategy> {
        Box::new(Doubling {
            factory: Arc::clone(&self.factory),
            inner: self.inner.snapshot(),
            epoch_len: self.epoch_len,
            used: self.used,
            name: self.name.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategy::ScoutingBandits;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn epochs_double() {
        let factory: StrategyFactory =
            Arc::new(|h| ScoutingBandits::auto(h).map(|s| Box::new(s) as Box<dyn Strategy>));
        let mut d = Doubling::new(factory).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut lens = Vec::new();
        for _ in 0..15 {
            d.post(&mut rng);
            d.observe(&Feedback::Realistic { seller_accepts: true, buyer_accepts: true }).unwrap();
            lens.push(d.epoch_len());
        }
        assert_eq!(lens, [1, 2, 2, 4, 4, 4, 4, 8, 8, 8, 8, 8, 8, 8, 8]);
    }
}
