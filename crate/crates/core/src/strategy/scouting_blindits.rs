//! Scouting blindits: estimate the expected gain from trade at each grid
//! point with two-price probes and trade-bit feedback, then commit to the
//! best grid point and post it to both sides, ignoring all feedback.

use rand::{Rng, RngCore};

use super::{expect_kind, no_pending, tuning, Strategy};
use crate::error::{Error, Result};
use crate::types::{Feedback, FeedbackKind, Posting, Price, PricePairWBB};

#[derive(Debug, Clone)]
pub struct ScoutingBlindits {
    t0: u64,
    grid: Vec<f64>,
    f_hat: Vec<f64>,
    g_hat: Vec<f64>,
    /// Rounds completed.
    t: u64,
    /// Zero-based grid cursor.
    k: usize,
    p_star: Option<Price>,
    pending: bool,
}

impl ScoutingBlindits {
    pub fn new(t0: u64, k: u64) -> Result<Self> {
        if t0 == 0 || k == 0 {
            return Err(Error::InvalidParameter(format!("need T0 >= 1 and K >= 1, got T0={t0}, K={k}")));
        }
        let grid = (1..=k).map(|i| i as f64 / (k + 1) as f64).collect();
        Ok(ScoutingBlindits {
            t0,
            grid,
            f_hat: vec![0.0; k as usize],
            g_hat: vec![0.0; k as usize],
            t: 0,
            k: 0,
            p_star: None,
            pending: false,
        })
    }

    pub fn auto(horizon: u64) -> Result<Self> {
        let (t0, k) = tuning::scouting_blindits_auto(horizon);
        Self::new(t0, k)
    }

    pub fn scouting_rounds(&self) -> u64 {
        2 * self.grid.len() as u64 * self.t0
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Zero-based grid index probed in the next scouting round.
    pub fn cursor(&self) -> usize {
        self.k
    }

    pub fn estimates(&self) -> Vec<(f64, f64)> {
        self.f_hat.iter().copied().zip(self.g_hat.iter().copied()).collect()
    }

    /// The committed price, once scouting is over.
    pub fn committed_price(&self) -> Option<Price> {
        self.p_star
    }

    fn commit(&mut self) {
        let mut best = 0;
        for i in 1..self.grid.len() {
            if self.f_hat[i] + self.g_hat[i] > self.f_hat[best] + self.g_hat[best] {
                best = i;
            }
        }
        self.p_star = Some(Price::saturating(self.grid[best]));
    }

    fn scouting(&self) -> bool {
        self.p_star.is_none()
    }
}

impl Strategy for ScoutingBlindits {
    fn name(&self) -> &str {
        "scouting_blindits"
    }

    fn required_feedback(&self) -> FeedbackKind {
        FeedbackKind::TradeBit
    }

    fn post(&mut self, rng: &mut dyn RngCore) -> Posting {
        self.pending = true;
        if let Some(p) = self.p_star {
            return Posting::Pair(PricePairWBB::budget_balanced(p));
        }
        let q = self.grid[self.k];
        let round = self.t + 1;
        let (lo, hi) = if round % 2 == 1 {
            (q, q + rng.gen::<f64>() * (1.0 - q))
        } else {
            (rng.gen::<f64>() * q, q)
        };
        let lo = Price::saturating(lo);
        let hi = Price::saturating(hi.max(lo.value()));
        Posting::Pair(PricePairWBB::new(lo, hi).expect("lo <= hi by construction"))
    }

    fn observe(&mut self, feedback: &Feedback) -> Result<()> {
        expect_kind(FeedbackKind::TradeBit, feedback)?;
        if !self.pending {
            return Err(no_pending());
        }
        self.pending = false;
        let Feedback::TradeBit { traded } = *feedback else { unreachable!() };
        self.t += 1;
        if !self.scouting() {
            return Ok(());
        }
        let q = self.grid[self.k];
        if traded {
            if self.t % 2 == 1 {
                self.f_hat[self.k] += (1.0 - q) / self.t0 as f64;
            } else {
                self.g_hat[self.k] += q / self.t0 as f64;
            }
        }
        if self.t >= 2 * (self.k as u64 + 1) * self.t0 {
            self.k += 1;
        }
        if self.t == self.scouting_rounds() {
            self.commit();
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
    fn schedule_k2_t03() {
        let mut s = ScoutingBlindits::new(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut cursors = Vec::new();
        for _ in 0..12 {
            cursors.push(s.cursor());
            assert!(s.committed_price().is_none());
            s.post(&mut rng);
            s.observe(&Feedback::TradeBit { traded: false }).unwrap();
        }
        assert_eq!(cursors, [0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1]);
        assert!(s.committed_price().is_some());
        // ties go to the lowest grid index
        assert_eq!(s.committed_price().unwrap().value(), 1.0 / 3.0);
    }

    #[test]
    fn odd_round_increment() {
        // K = 1 puts q_1 at 1/2
        let mut s = ScoutingBlindits::new(4, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let Posting::Pair(pp) = s.post(&mut rng) else { panic!() };
        assert_eq!(pp.seller_price().value(), 0.5);
        assert!(pp.buyer_price().value() >= 0.5);
        s.observe(&Feedback::TradeBit { traded: true }).unwrap();
        assert!((s.estimates()[0].0 - 0.5 / 4.0).abs() < 1e-15);
        let Posting::Pair(pp) = s.post(&mut rng) else { panic!() };
        assert_eq!(pp.buyer_price().value(), 0.5);
        assert!(pp.seller_price().value() <= 0.5);
    }

    #[test]
    fn blind_phase_is_budget_balanced() {
        let mut s = ScoutingBlindits::new(2, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for t in 0..40 {
            let posting = s.post(&mut rng);
            // make the middle grid point look best
            let traded = s.cursor() == 1 && t < 12;
            s.observe(&Feedback::TradeBit { traded }).unwrap();
            if t >= 12 {
                let pp = posting.as_pair();
                assert_eq!(pp.seller_price(), pp.buyer_price());
                assert_eq!(pp.seller_price().value(), 0.5);
            }
        }
    }
}
