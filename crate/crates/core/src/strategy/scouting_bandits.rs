//! Scouting bandits: explore with uniform prices to estimate the global
//! integral terms of the expected gain from trade on a grid, then run a
//! bandit over the grid whose rewards combine those estimates with the
//! two acceptance bits.

use rand::{Rng, RngCore};

use super::bandit::{BanditCore, Moss};
use super::{expect_kind, no_pending, tuning, Strategy};
use crate::error::{Error, Result};
use crate::types::{Feedback, FeedbackKind, Posting, Price};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Scouting,
    Bandit,
}

#[derive(Debug, Clone, Copy)]
enum Pending {
    Scout(f64),
    Arm(usize),
}

pub struct ScoutingBandits {
    t0: u64,
    grid: Vec<f64>,
    // Integer counts; the estimates are these divided by T0.
    count_f: Vec<u64>,
    count_g: Vec<u64>,
    bandit: Box<dyn BanditCore>,
    t: u64,
    pending: Option<Pending>,
}

impl Clone for ScoutingBandits {
    fn clone(&self) -> Self {
        ScoutingBandits {
            t0: self.t0,
            grid: self.grid.clone(),
            count_f: self.count_f.clone(),
            count_g: self.count_g.clone(),
            bandit: self.bandit.box_clone(),
            t: self.t,
            pending: self.pending,
        }
    }
}

impl ScoutingBandits {
    /// Grid `q_k = k / (K + 1)` for `k = 1..=K`.
    pub fn new(t0: u64, k: u64, bandit: Box<dyn BanditCore>) -> Result<Self> {
        if t0 == 0 || k == 0 {
            return Err(Error::InvalidParameter(format!("need T0 >= 1 and K >= 1, got T0={t0}, K={k}")));
        }
        if bandit.num_arms() as u64 != k {
            return Err(Error::InvalidParameter(format!(
                "bandit has {} arms, grid has {k}",
                bandit.num_arms()
            )));
        }
        let grid = (1..=k).map(|i| i as f64 / (k + 1) as f64).collect();
        Ok(ScoutingBandits {
            t0,
            grid,
            count_f: vec![0; k as usize],
            count_g: vec![0; k as usize],
            bandit,
            t: 0,
            pending: None,
        })
    }

    /// MOSS over the given grid, tuned for the remaining `horizon - T0`
    /// rounds.
    pub fn with_moss(t0: u64, k: u64, horizon: u64) -> Result<Self> {
        let bandit_horizon = horizon.saturating_sub(t0).max(k);
        Self::new(t0, k, Box::new(Moss::new(k as usize, bandit_horizon)?))
    }

    /// Horizon-tuned parameters with a MOSS core.
    pub fn auto(horizon: u64) -> Result<Self> {
        let (t0, k) = tuning::scouting_bandits_auto(horizon);
        Self::with_moss(t0, k, horizon)
    }

    pub fn t0(&self) -> u64 {
        self.t0
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn phase(&self) -> Phase {
        if self.t < self.t0 {
            Phase::Scouting
        } else {
            Phase::Bandit
        }
    }

    /// `(F_k, G_k)` per grid point.
    pub fn estimates(&self) -> Vec<(f64, f64)> {
        let t0 = self.t0 as f64;
        self.count_f
            .iter()
            .zip(&self.count_g)
            .map(|(&f, &g)| (f as f64 / t0, g as f64 / t0))
            .collect()
    }

    /// Reward handed to the bandit for arm `k`, `seller_bit * F_k +
    /// buyer_bit * G_k`.
    pub fn bandit_reward(&self, arm: usize, seller_accepts: bool, buyer_accepts: bool) -> f64 {
        let num = u64::from(seller_accepts) * self.count_f[arm] + u64::from(buyer_accepts) * self.count_g[arm];
        // F_k + G_k can exceed 1 only through ties U = q_k.
        (num as f64 / self.t0 as f64).min(1.0)
    }
}

impl Strategy for ScoutingBandits {
    fn name(&self) -> &str {
        "scouting_bandits"
    }

    fn required_feedback(&self) -> FeedbackKind {
        FeedbackKind::Realistic
    }

    fn post(&mut self, rng: &mut dyn RngCore) -> Posting {
        let (pending, price) = match self.phase() {
            Phase::Scouting => {
                let u: f64 = rng.gen();
                (Pending::Scout(u), u)
            }
            Phase::Bandit => {
                let arm = self.bandit.select_arm(rng);
                (Pending::Arm(arm), self.grid[arm])
            }
        };
        self.pending = Some(pending);
        Posting::Single(Price::saturating(price))
    }

    fn observe(&mut self, feedback: &Feedback) -> Result<()> {
        expect_kind(FeedbackKind::Realistic, feedback)?;
        let Feedback::Realistic { seller_accepts, buyer_accepts } = *feedback else { unreachable!() };
        match self.pending.take().ok_or_else(no_pending)? {
            Pending::Scout(u) => {
                for (k, &q) in self.grid.iter().enumerate() {
                    if buyer_accepts && q <= u {
                        self.count_f[k] += 1;
                    }
                    if seller_accepts && u <= q {
                        self.count_g[k] += 1;
                    }
                }
            }
            Pending::Arm(arm) => {
                let z = self.bandit_reward(arm, seller_accepts, buyer_accepts);
                self.bandit.update(arm, z)?;
            }
        }
        self.t += 1;
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

    fn realistic(s: bool, b: bool) -> Feedback {
        Feedback::Realistic { seller_accepts: s, buyer_accepts: b }
    }

    #[test]
    fn estimates_stay_in_unit_interval() {
        let mut sb = ScoutingBandits::with_moss(4, 1, 100).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..4 {
            assert_eq!(sb.phase(), Phase::Scouting);
            sb.post(&mut rng);
            sb.observe(&realistic(true, true)).unwrap();
        }
        assert_eq!(sb.phase(), Phase::Bandit);
        let (f, g) = sb.estimates()[0];
        assert!((0.0..=1.0).contains(&f) && (0.0..=1.0).contains(&g));
    }

    #[test]
    fn bandit_reward_arithmetic() {
        let mut sb = ScoutingBandits::with_moss(10, 1, 100).unwrap();
        sb.count_f[0] = 3;
        sb.count_g[0] = 2;
        assert!((sb.bandit_reward(0, true, true) - 0.5).abs() < 1e-15);
        assert_eq!(sb.bandit_reward(0, false, false), 0.0);
        assert!((sb.bandit_reward(0, true, false) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn bandit_phase_posts_grid_points() {
        let mut sb = ScoutingBandits::with_moss(2, 3, 100).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..2 {
            sb.post(&mut rng);
            sb.observe(&realistic(true, false)).unwrap();
        }
        for _ in 0..10 {
            let Posting::Single(p) = sb.post(&mut rng) else { panic!() };
            assert!(sb.grid().contains(&p.value()));
            sb.observe(&realistic(false, true)).unwrap();
        }
    }

    #[test]
    fn rejects_mismatched_bandit() {
        assert!(ScoutingBandits::new(4, 3, Box::new(Moss::new(2, 10).unwrap())).is_err());
        assert!(ScoutingBandits::with_moss(0, 3, 10).is_err());
    }
}
