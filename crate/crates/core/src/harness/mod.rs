//! Experiment engine: runs learners against environments, measures regret
//! at checkpoints, replicates with derived seeds and aggregates.

mod spec;
mod stats;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use spec::{AlgoSpec, AutoTag, BanditKind, BuildContext, EnvSpec, NamedPrice, PriceChoice, Tuned};
pub use stats::{fit_slope, mean_ci, CheckpointStats, SlopeFit};

use crate::adversary::Adversary;
use crate::env::PairDistribution;
use crate::error::{Error, Result};
use crate::exact::GainUnits;
use crate::oracle::{self, empirical_best_in_hindsight_exact};
use crate::parallel::{map_indexed, Execution};
use crate::strategy::FullFeedbackAdapter;
use crate::types::{gft, make_feedback_wbb, FeedbackKind, Posting, Price, ValuationPair};

/// Grid used for the population-optimal price.
pub const BEST_PRICE_RESOLUTION: usize = 1001;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub env: EnvSpec,
    pub algo: AlgoSpec,
    pub feedback: FeedbackKind,
    pub horizons: Vec<u64>,
    pub replications: usize,
    pub master_seed: u64,
    /// Rounds at which regret is recorded; `None` means the geometric grid
    /// `floor(T 2^-j)` plus `T`.
    #[serde(default)]
    pub checkpoints: Option<Vec<u64>>,
    /// When false, auto-tuned learners run under the doubling trick.
    #[serde(default = "default_true")]
    pub horizon_known: bool,
}

fn default_true() -> bool {
    true
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.horizons.is_empty() || self.horizons.contains(&0) {
            return Err(Error::Config("horizons must be a non-empty list of positive rounds".into()));
        }
        if self.horizons.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("horizons must be strictly ascending".into()));
        }
        if self.replications == 0 {
            return Err(Error::Config("replications must be >= 1".into()));
        }
        let required = self.algo.required_feedback();
        let adversarial = matches!(self.env, EnvSpec::Adversarial { .. });
        let ok = if adversarial {
            self.feedback == FeedbackKind::Full
        } else {
            self.feedback == required || required == FeedbackKind::None
        };
        if !ok {
            return Err(Error::Config(format!(
                "feedback mismatch: {} requires {} feedback, experiment provides {}",
                self.algo.label(),
                required.name(),
                self.feedback.name()
            )));
        }
        self.env.distribution()?;
        Ok(())
    }

    pub fn checkpoints_for(&self, horizon: u64) -> Vec<u64> {
        let mut pts: Vec<u64> = match &self.checkpoints {
            Some(c) => c.iter().copied().filter(|&t| t >= 1 && t <= horizon).collect(),
            None => (0..64).map(|j| horizon >> j).take_while(|&t| t >= 1).collect(),
        };
        pts.push(horizon);
        pts.sort_unstable();
        pts.dedup();
        pts
    }
}

/// `splitmix64` finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replication `rep`; depends on nothing else.
pub fn derive_seed(master_seed: u64, rep: usize) -> u64 {
    mix(mix(master_seed) ^ mix(rep as u64 ^ 0xD1B5_4A32_D192_ED03))
}

const ENV_STREAM: u64 = 0;
const STRATEGY_STREAM: u64 = 1;
const PROBE_STREAM: u64 = 2;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub t: u64,
    pub cumulative_reward: f64,
    pub pseudo_regret: f64,
    pub empirical_regret: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretTrace {
    pub rep: usize,
    pub seed: u64,
    pub horizon: u64,
    pub env: String,
    pub algo: String,
    pub points: Vec<TracePoint>,
}

impl RegretTrace {
    pub fn last(&self) -> &TracePoint {
        self.points.last().expect("traces have at least one checkpoint")
    }
}

/// Environment state shared by all replications of one experiment.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub distribution: Option<PairDistribution>,
    pub optimal: Option<(Price, f64)>,
}

impl Prepared {
    pub fn new(env: &EnvSpec) -> Result<Self> {
        let distribution = env.distribution()?;
        let optimal = distribution.as_ref().map(|d| d.best_price(BEST_PRICE_RESOLUTION));
        Ok(Prepared { distribution, optimal })
    }
}

/// Expected gain of a posting, caching the last evaluated single price.
struct ExpectedGain<'a> {
    d: &'a PairDistribution,
    last: Option<(Posting, f64)>,
}

impl ExpectedGain<'_> {
    fn of(&mut self, p: Posting) -> f64 {
        if let Some((q, v)) = self.last {
            if q == p {
                return v;
            }
        }
        let v = match p {
            Posting::Single(x) => self.d.expected_gft(x),
            Posting::Pair(pp) => self.d.expected_gft_wbb(pp),
        };
        self.last = Some((p, v));
        v
    }
}

pub fn run_episode(cfg: &ExperimentConfig, horizon: u64, rep: usize) -> Result<RegretTrace> {
    cfg.validate()?;
    run_prepared(cfg, &Prepared::new(&cfg.env)?, horizon, rep)
}

/// One replication at one horizon, with the environment precomputed.
pub fn run_prepared(cfg: &ExperimentConfig, prep: &Prepared, horizon: u64, rep: usize) -> Result<RegretTrace> {
    let seed = derive_seed(cfg.master_seed, rep);
    let mut env_rng = stream(seed, ENV_STREAM);
    let mut strat_rng = stream(seed, STRATEGY_STREAM);

    let cx = BuildContext {
        horizon,
        horizon_known: cfg.horizon_known,
        distribution: prep.distribution.as_ref(),
        optimal_price: prep.optimal.map(|o| o.0),
    };
    let mut strategy = cfg.algo.build(&cx)?;
    let mut adversary = match cfg.env {
        EnvSpec::Adversarial { eps, probe_budget } => {
            if strategy.required_feedback() != FeedbackKind::Full {
                strategy = Box::new(FullFeedbackAdapter::new(strategy));
            }
            let budget = probe_budget.unwrap_or(if strategy.is_deterministic() { 1 } else { 1000 });
            let probe_seed = stream(seed, PROBE_STREAM).next_u64();
            Some(Adversary::new(eps, strategy.as_ref(), budget, probe_seed)?)
        }
        _ => None,
    };
    let delivered = strategy.required_feedback();

    let checkpoints = cfg.checkpoints_for(horizon);
    let mut next_cp = 0;
    let mut points = Vec::with_capacity(checkpoints.len());
    let mut valuations: Vec<ValuationPair> = Vec::with_capacity(horizon as usize);
    let mut postings: Vec<Posting> = Vec::new();
    let mut rewards = 0.0;
    let mut reward_units = GainUnits::ZERO;
    let mut pseudo = 0.0;
    let mut gain = prep.distribution.as_ref().map(|d| ExpectedGain { d, last: None });
    let g_star = prep.optimal.map_or(0.0, |o| o.1);

    for t in 1..=horizon {
        let v = match adversary.as_mut() {
            Some(a) => a.next_valuation()?,
            None => prep.distribution.as_ref().expect("stochastic").sample(&mut env_rng),
        };
        let posting = strategy.post(&mut strat_rng);
        let r = posting.reward(v);
        rewards += r;
        reward_units += GainUnits::from_f64(r);
        if let Some(g) = gain.as_mut() {
            pseudo += g_star - g.of(posting);
        } else {
            postings.push(posting);
        }
        strategy.observe(&make_feedback_wbb(delivered, posting.as_pair(), v))?;
        valuations.push(v);

        if t == checkpoints[next_cp] {
            let (_, best) = empirical_best_in_hindsight_exact(&valuations)?;
            points.push(TracePoint {
                t,
                cumulative_reward: rewards,
                pseudo_regret: pseudo,
                empirical_regret: (best - reward_units).to_f64(),
            });
            next_cp += 1;
        }
    }

    // Against the adversary, regret is measured against the limit price of
    // its nested intervals, which is only known once the run ends.
    if let Some(a) = adversary {
        let p_star = a.common_price()?;
        let mut acc = 0.0;
        let mut cp = 0;
        for (i, (v, posting)) in valuations.iter().zip(&postings).enumerate() {
            acc += gft(p_star, *v) - posting.reward(*v);
            if i as u64 + 1 == points[cp].t {
                points[cp].pseudo_regret = acc;
                cp += 1;
            }
        }
    }

    Ok(RegretTrace {
        rep,
        seed,
        horizon,
        env: cfg.env.label(),
        algo: cfg.algo.label(),
        points,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonSummary {
    pub horizon: u64,
    pub checkpoints: Vec<CheckpointStats>,
    pub theoretical_upper_bound: Option<f64>,
    pub lower_bound_reference: Option<f64>,
    pub traces: Vec<RegretTrace>,
}

impl HorizonSummary {
    pub fn final_stats(&self) -> &CheckpointStats {
        self.checkpoints.last().expect("at least one checkpoint")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub name: String,
    pub env: String,
    pub algo: String,
    pub optimal_price: Option<f64>,
    pub optimal_value: Option<f64>,
    pub horizons: Vec<HorizonSummary>,
}

impl Summary {
    /// `(T, mean final pseudo-regret)` per horizon.
    pub fn final_means(&self) -> Vec<(u64, f64)> {
        self.horizons.iter().map(|h| (h.horizon, h.final_stats().mean_pseudo_regret)).collect()
    }

    pub fn fit(&self) -> Result<SlopeFit> {
        fit_slope(&self.final_means())
    }
}

pub fn replicate_and_aggregate(cfg: &ExperimentConfig) -> Result<Summary> {
    replicate_with(cfg, Execution::default())
}

pub fn replicate_with(cfg: &ExperimentConfig, exec: Execution) -> Result<Summary> {
    cfg.validate()?;
    let prep = Prepared::new(&cfg.env)?;
    let density_bound = prep.distribution.as_ref().and_then(|d| d.density_bound());
    let mut horizons = Vec::with_capacity(cfg.horizons.len());
    for &t in &cfg.horizons {
        let traces = map_indexed(cfg.replications, exec, |rep| run_prepared(cfg, &prep, t, rep))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let checkpoints = stats::aggregate(&traces);
        let lower = cfg.env.lower_bound_regime().and_then(oracle::lower_bound).map(|lb| lb.at(t));
        horizons.push(HorizonSummary {
            horizon: t,
            checkpoints,
            theoretical_upper_bound: cfg.algo.upper_bound(t, density_bound)?,
            lower_bound_reference: lower,
            traces,
        });
    }
    Ok(Summary {
        name: cfg.name.clone(),
        env: cfg.env.label(),
        algo: cfg.algo.label(),
        optimal_price: prep.optimal.map(|o| o.0.value()),
        optimal_value: prep.optimal.map(|o| o.1),
        horizons,
    })
}
