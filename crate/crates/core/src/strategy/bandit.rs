//! Stochastic bandit cores used by the bandit phase of scouting bandits.

use rand::RngCore;

use crate::error::{Error, Result};

pub trait BanditCore: Send {
    fn num_arms(&self) -> usize;

    /// Zero-based arm index.
    fn select_arm(&mut self, rng: &mut dyn RngCore) -> usize;

    /// `reward` must lie in `[0, 1]`.
    fn update(&mut self, arm: usize, reward: f64) -> Result<()>;

    fn box_clone(&self) -> Box<dyn BanditCore>;
}

impl Clone for Box<dyn BanditCore> {
    fn clone(&self) -> Self {
        self.box_clone()
    }
}

/// MOSS: index `mu_i + sqrt(max(0, ln(H / (K n_i))) / n_i)`, each arm
/// pulled once first, ties to the lowest index.
///
/// An arm's index depends only on its own statistics, so it is cached and
/// refreshed on update.
#[derive(Debug, Clone)]
pub struct Moss {
    horizon: u64,
    counts: Vec<u64>,
    sums: Vec<f64>,
    indices: Vec<f64>,
}

impl Moss {
    pub fn new(k: usize, horizon: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("MOSS needs at least one arm".into()));
        }
        if horizon < k as u64 {
            return Err(Error::InvalidParameter(format!("MOSS horizon {horizon} < K = {k}")));
        }
        Ok(Moss {
            horizon,
            counts: vec![0; k],
            sums: vec![0.0; k],
            indices: vec![f64::INFINITY; k],
        })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn index(&self, arm: usize) -> f64 {
        let n = self.counts[arm] as f64;
        let k = self.counts.len() as f64;
        let bonus = ((self.horizon as f64 / (k * n)).ln().max(0.0) / n).sqrt();
        self.sums[arm] / n + bonus
    }
}

impl BanditCore for Moss {
    fn num_arms(&self) -> usize {
        self.counts.len()
    }

    fn select_arm(&mut self, _rng: &mut dyn RngCore) -> usize {
        if let Some(i) = self.counts.iter().position(|&c| c == 0) {
            return i;
        }
        let mut best = 0;
        for i in 1..self.indices.len() {
            if self.indices[i] > self.indices[best] {
                best = i;
            }
        }
        best
    }

    fn update(&mut self, arm: usize, reward: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&reward) {
            return Err(Error::RewardOutOfRange(reward));
        }
        if arm >= self.counts.len() {
            return Err(Error::Protocol(format!("arm {arm} out of range")));
        }
        self.counts[arm] += 1;
        self.sums[arm] += reward;
        self.indices[arm] = self.index(arm);
        Ok(())
    }

    fn box_clone(&self) -> Box<dyn BanditCore> {
        Box::new(self.clone())
    }
}
