//! An oblivious adversary that forces linear regret on any full-feedback
//! learner.
//!
//! The adversary keeps nested intervals `[c_t, d_t]` of width
//! `eps / 3^(t-1)`. Each round it estimates the mass that the learner's
//! next price puts on `[0, threshold]` and emits a valuation pair whose
//! trade interval the learner hits with probability at most 1/2, while
//! every pair still contains the limit point of the intervals.
//!
//! Thirds of the interval stop being representable after a few dozen
//! rounds. Once the step falls below [`FINE_STEP`] the adversary switches to
//! a refinement that shrinks the interval only when the sampled prices fall
//! inside it, and then by as little as floating point allows. Every round
//! keeps the same guarantee: the learner trades with sampled probability at
//! most 1/2, and the emitted pair contains the final common price.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::strategy::Strategy;
use crate::types::{Feedback, FeedbackKind, Posting, Price, ValuationPair};

/// Geometric steps below this switch the adversary to float refinement.
pub const FINE_STEP: f64 = 1.0 / (1u64 << 30) as f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// Intervals shrink by thirds.
    Geometric,
    /// Intervals shrink to the nearest float excluding the sampled majority.
    Fine,
    /// The interval is a single point; emissions repeat its endpoints.
    Frozen,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdversaryState {
    eps: f64,
    c: f64,
    d: f64,
    /// `2 eps / 3^t` for the next shrink.
    step: f64,
    t: u64,
    phase: Phase,
    history: Vec<ValuationPair>,
}

impl AdversaryState {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0 / 18.0) {
            return Err(Error::InvalidParameter(format!("adversary eps {eps} outside (0, 1/18)")));
        }
        Ok(AdversaryState {
            eps,
            c: 0.0,
            d: 1.0,
            step: 2.0 * eps / 3.0,
            t: 0,
            phase: Phase::Geometric,
            history: Vec::new(),
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Rounds emitted so far.
    pub fn round(&self) -> u64 {
        self.t
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.c, self.d)
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn is_frozen(&self) -> bool {
        self.phase == Phase::Frozen
    }

    pub fn history(&self) -> &[ValuationPair] {
        &self.history
    }

    /// Price level whose lower mass decides the next emission.
    pub fn threshold(&self) -> f64 {
        if self.t == 0 {
            0.5 - 0.5 * self.eps
        } else if self.phase == Phase::Geometric {
            self.c + 0.5 * self.step
        } else {
            self.c
        }
    }

    fn check_round(&self, round: u64) -> Result<()> {
        if round != self.t + 1 {
            return Err(Error::Protocol(format!("adversary expected round {}, got {round}", self.t + 1)));
        }
        Ok(())
    }

    fn emit(&mut self, s: f64, b: f64) -> Result<ValuationPair> {
        let v = ValuationPair::new(s, b)?;
        self.t += 1;
        self.history.push(v);
        Ok(v)
    }

    /// Emits round `round` (1-based) given the learner's mass on
    /// `[0, threshold()]`. Past the geometric phase a mass alone cannot
    /// refine the interval, so the current endpoints are repeated; use
    /// [`AdversaryState::next_valuation_sampled`] to keep refining.
    pub fn next_valuation(&mut self, round: u64, mass: f64) -> Result<ValuationPair> {
        self.check_round(round)?;
        let low = mass <= 0.5;
        if self.t == 0 {
            let e = self.eps;
            return if low {
                (self.c, self.d) = (0.5 - 1.5 * e, 0.5 - 0.5 * e);
                self.emit(0.0, self.d)
            } else {
                (self.c, self.d) = (0.5 + 0.5 * e, 0.5 + 1.5 * e);
                self.emit(self.c, 1.0)
            };
        }
        if self.phase == Phase::Geometric {
            if low {
                self.d -= self.step;
            } else {
                self.c += self.step;
            }
            self.step /= 3.0;
            if self.d <= self.c {
                self.d = self.c;
                self.phase = Phase::Frozen;
            } else if self.step < FINE_STEP {
                self.phase = Phase::Fine;
            }
        }
        if low {
            self.emit(0.0, self.d)
        } else {
            self.emit(self.c, 1.0)
        }
    }

    /// Emits round `round` from a sample of the learner's next prices.
    ///
    /// In the fine phase the pair is `(c, 1)` or `(0, d)` when at most half
    /// the sample trades against it; otherwise the interval is cut at the
    /// sample median, just outside it, keeping the wider side.
    pub fn next_valuation_sampled(&mut self, round: u64, prices: &[f64]) -> Result<ValuationPair> {
        if prices.is_empty() {
            return Err(Error::Empty("price sample"));
        }
        let n = prices.len();
        let frac = |pred: &dyn Fn(f64) -> bool| prices.iter().filter(|&&p| pred(p)).count() as f64 / n as f64;
        if self.phase != Phase::Fine || self.t == 0 {
            let th = self.threshold();
            return self.next_valuation(round, frac(&|p| p <= th));
        }
        self.check_round(round)?;
        let (c, d) = (self.c, self.d);
        if frac(&|p| p >= c) <= 0.5 {
            return self.emit(c, 1.0);
        }
        if frac(&|p| p <= d) <= 0.5 {
            return self.emit(0.0, d);
        }
        let mut sorted = prices.to_vec();
        sorted.sort_by(f64::total_cmp);
        // Fewer than half the sample lies at or below `prev(q)`, and fewer
        // than half at or above `next(r)`; `r <= q`, so one cut fits.
        let q = sorted[n / 2];
        let r = sorted[n - 1 - n / 2];
        let left = (q > c).then(|| q.next_down());
        let right = (r < d).then(|| r.next_up());
        let keep_left = match (left, right) {
            (Some(m), Some(m2)) => m - c >= d - m2,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => unreachable!("r <= q rules out c >= q and r >= d with c < d"),
        };
        let v = if keep_left {
            self.d = left.expect("checked");
            self.emit(0.0, self.d)?
        } else {
            self.c = right.expect("checked");
            self.emit(self.c, 1.0)?
        };
        if self.c >= self.d {
            self.d = self.c;
            self.phase = Phase::Frozen;
        }
        Ok(v)
    }

    /// Left endpoint `c_t`; it lies in `[s_u, b_u]` for every emitted round.
    pub fn common_price(&self) -> Result<Price> {
        if self.t == 0 {
            return Err(Error::Protocol("common price needs at least one round".into()));
        }
        Price::new(self.c)
    }
}

fn posted_price(p: Posting) -> f64 {
    // A price pair hits the trade interval only if both prices lie in it,
    // so its lower price is the one tested against the threshold.
    p.as_pair().seller_price().value()
}

fn check_full(strategy: &dyn Strategy) -> Result<()> {
    if strategy.required_feedback() == FeedbackKind::Full {
        Ok(())
    } else {
        Err(Error::FeedbackMismatch {
            expected: FeedbackKind::Full,
            got: strategy.required_feedback(),
        })
    }
}

/// Fraction of `budget` fresh replays of `history` whose next price is at
/// most `threshold`. Each replay starts from `make()` and uses its own
/// randomness drawn from `rng`.
pub fn probe_mass(
    make: &dyn Fn() -> Box<dyn Strategy>,
    history: &[ValuationPair],
    threshold: f64,
    budget: usize,
    rng: &mut dyn RngCore,
) -> Result<f64> {
    if budget == 0 {
        return Err(Error::InvalidParameter("probe budget must be >= 1".into()));
    }
    let mut below = 0usize;
    for _ in 0..budget {
        let mut clone = make();
        check_full(clone.as_ref())?;
        let mut r = ChaCha8Rng::seed_from_u64(rng.next_u64());
        for v in history {
            clone.post(&mut r);
            clone.observe(&Feedback::Full { s: v.s, b: v.b })?;
        }
        if posted_price(clone.post(&mut r)) <= threshold {
            below += 1;
        }
    }
    Ok(below as f64 / budget as f64)
}

/// The adversary with incremental probing: it keeps `budget` independent
/// copies of the learner, each advanced along the emitted history with its
/// own randomness, so a round costs one step per copy rather than a full
/// replay.
pub struct Adversary {
    state: AdversaryState,
    probes: Vec<(Box<dyn Strategy>, ChaCha8Rng)>,
    masses: Vec<f64>,
}

impl Adversary {
    /// `learner` is the learner in its initial state; it is only copied.
    pub fn new(eps: f64, learner: &dyn Strategy, budget: usize, seed: u64) -> Result<Self> {
        check_full(learner)?;
        if budget == 0 {
            return Err(Error::InvalidParameter("probe budget must be >= 1".into()));
        }
        let mut seeder = ChaCha8Rng::seed_from_u64(seed);
        let probes = (0..budget)
            .map(|_| (learner.snapshot(), ChaCha8Rng::seed_from_u64(seeder.next_u64())))
            .collect();
        Ok(Adversary {
            state: AdversaryState::new(eps)?,
            probes,
            masses: Vec::new(),
        })
    }

    pub fn state(&self) -> &AdversaryState {
        &self.state
    }

    /// Sampled mass on `[0, threshold]` at each emitted round.
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn next_valuation(&mut self) -> Result<ValuationPair> {
        let threshold = self.state.threshold();
        let prices: Vec<f64> = self.probes.iter_mut().map(|(s, r)| posted_price(s.post(r))).collect();
        let mass = prices.iter().filter(|&&p| p <= threshold).count() as f64 / prices.len() as f64;
        let v = self.state.next_valuation_sampled(self.state.round() + 1, &prices)?;
        for (s, _) in &mut self.probes {
            s.observe(&Feedback::Full { s: v.s, b: v.b })?;
        }
        self.masses.push(mass);
        Ok(v)
    }

    pub fn common_price(&self) -> Result<Price> {
        self.state.common_price()
    }
}
