//! Named environments and learners, as they appear in experiment configs.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::env::{self, PairDistribution};
use crate::error::{Error, Result};
use crate::oracle;
use crate::strategy::doubling::StrategyFactory;
use crate::strategy::{
    tuning, Doubling, Fbp, FixedPrice, IndexMode, MedianMechanism, Moss, ScoutingBandits, ScoutingBlindits,
    SingleSample, Strategy, UniformRandom,
};
use crate::types::{FeedbackKind, Price};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvSpec {
    UniformIid,
    SqrtLower { eps: f64 },
    T23Lower { eps: f64 },
    BdLower { lambda: f64 },
    Needle { x: f64 },
    CheapSeller { eps: f64 },
    /// First member of the one-bit pair (uniform).
    OneBitUniform,
    /// Second member of the one-bit pair (tilted).
    OneBitTilted,
    Adversarial {
        eps: f64,
        /// Defaults to 1 for deterministic learners and 1000 otherwise.
        #[serde(default)]
        probe_budget: Option<usize>,
    },
}

impl EnvSpec {
    pub fn label(&self) -> String {
        match self {
            EnvSpec::UniformIid => "uniform_iid".into(),
            EnvSpec::SqrtLower { eps } => format!("sqrt_lower(eps={eps})"),
            EnvSpec::T23Lower { eps } => format!("t23_lower(eps={eps})"),
            EnvSpec::BdLower { lambda } => format!("bd_lower(lambda={lambda})"),
            EnvSpec::Needle { x } => format!("needle(x={x})"),
            EnvSpec::CheapSeller { eps } => format!("cheap_seller(eps={eps})"),
            EnvSpec::OneBitUniform => "one_bit_uniform".into(),
            EnvSpec::OneBitTilted => "one_bit_tilted".into(),
            EnvSpec::Adversarial { eps, .. } => format!("adversarial(eps={eps})"),
        }
    }

    /// The stochastic law, or `None` for the adversary.
    pub fn distribution(&self) -> Result<Option<PairDistribution>> {
        Ok(Some(match *self {
            EnvSpec::UniformIid => env::uniform_iid(),
            EnvSpec::SqrtLower { eps } => env::sqrt_lower_instance(eps)?,
            EnvSpec::T23Lower { eps } => env::t23_lower_instance(eps)?,
            EnvSpec::BdLower { lambda } => env::bd_lower_instance(lambda)?,
            EnvSpec::Needle { x } => env::needle_instance(x)?,
            EnvSpec::CheapSeller { eps } => env::cheap_seller_instance(eps)?,
            EnvSpec::OneBitUniform => env::one_bit_pair().0,
            EnvSpec::OneBitTilted => env::one_bit_pair().1,
            EnvSpec::Adversarial { eps, .. } => {
                crate::adversary::AdversaryState::new(eps)?;
                return Ok(None);
            }
        }))
    }

    /// Lower-bound row that this environment family instantiates.
    pub fn lower_bound_regime(&self) -> Option<&'static str> {
        match self {
            EnvSpec::SqrtLower { .. } => Some("full_iid"),
            EnvSpec::T23Lower { .. } => Some("realistic_iv_bd"),
            EnvSpec::BdLower { .. } => Some("realistic_bd"),
            EnvSpec::Needle { .. } => Some("realistic_iv"),
            EnvSpec::Adversarial { .. } => Some("adversarial"),
            _ => None,
        }
    }
}

/// A count that is either given or derived from the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Tuned {
    Fixed(u64),
    Auto(AutoTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutoTag {
    Auto,
}

impl Default for Tuned {
    fn default() -> Self {
        Tuned::Auto(AutoTag::Auto)
    }
}

impl Tuned {
    fn resolve(self, auto: u64) -> Result<u64> {
        match self {
            Tuned::Fixed(0) => Err(Error::Config("tuned parameters must be >= 1".into())),
            Tuned::Fixed(n) => Ok(n),
            Tuned::Auto(_) => Ok(auto),
        }
    }

    fn is_auto(self) -> bool {
        matches!(self, Tuned::Auto(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BanditKind {
    #[default]
    Moss,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PriceChoice {
    Value(f64),
    Named(NamedPrice),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedPrice {
    /// The population-optimal price of the environment.
    Optimal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algo", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgoSpec {
    Fbp {
        #[serde(default)]
        naive_index: bool,
    },
    ScoutingBandits {
        #[serde(rename = "T0", default)]
        t0: Tuned,
        #[serde(rename = "K", default)]
        k: Tuned,
        #[serde(default)]
        bandit: BanditKind,
        /// Use `K = ceil(M^{2/3} T^{1/3})` with the environment's density
        /// bound when `K` is auto.
        #[serde(default)]
        known_m: bool,
    },
    ScoutingBlindits {
        #[serde(rename = "T0", default)]
        t0: Tuned,
        #[serde(rename = "K", default)]
        k: Tuned,
    },
    FixedPrice {
        price: PriceChoice,
    },
    MedianMechanism,
    SingleSample,
    UniformRandom,
}

/// What a learner needs from its environment at build time.
pub struct BuildContext<'a> {
    pub horizon: u64,
    /// Strategies with auto parameters restart on doubling epochs.
    pub horizon_known: bool,
    pub distribution: Option<&'a PairDistribution>,
    pub optimal_price: Option<Price>,
}

impl AlgoSpec {
    pub fn label(&self) -> String {
        match self {
            AlgoSpec::Fbp { .. } => "fbp".into(),
            AlgoSpec::ScoutingBandits { .. } => "scouting_bandits".into(),
            AlgoSpec::ScoutingBlindits { .. } => "scouting_blindits".into(),
            AlgoSpec::FixedPrice { price: PriceChoice::Value(p) } => format!("fixed_price({p})"),
            AlgoSpec::FixedPrice { .. } => "fixed_price(optimal)".into(),
            AlgoSpec::MedianMechanism => "median_mechanism".into(),
            AlgoSpec::SingleSample => "single_sample".into(),
            AlgoSpec::UniformRandom => "uniform_random".into(),
        }
    }

    pub fn required_feedback(&self) -> FeedbackKind {
        match self {
            AlgoSpec::Fbp { .. } | AlgoSpec::SingleSample => FeedbackKind::Full,
            AlgoSpec::ScoutingBandits { .. } => FeedbackKind::Realistic,
            AlgoSpec::ScoutingBlindits { .. } => FeedbackKind::TradeBit,
            AlgoSpec::FixedPrice { .. } | AlgoSpec::MedianMechanism | AlgoSpec::UniformRandom => FeedbackKind::None,
        }
    }

    /// `(T0, K)` for the scouting learners at this horizon.
    pub fn resolved_tuning(&self, horizon: u64, density_bound: Option<f64>) -> Result<Option<(u64, u64)>> {
        Ok(match *self {
            AlgoSpec::ScoutingBandits { t0, k, known_m, .. } => {
                let (at0, mut ak) = tuning::scouting_bandits_auto(horizon);
                if known_m && k.is_auto() {
                    let m = density_bound.ok_or_else(|| Error::Config("known_m needs a density-bounded environment".into()))?;
                    ak = tuning::scouting_bandits_k_known_m(horizon, m);
                }
                Some((t0.resolve(at0)?, k.resolve(ak)?))
            }
            AlgoSpec::ScoutingBlindits { t0, k } => {
                let (at0, ak) = tuning::scouting_blindits_auto(horizon);
                Some((t0.resolve(at0)?, k.resolve(ak)?))
            }
            _ => None,
        })
    }

    fn uses_auto(&self) -> bool {
        match *self {
            AlgoSpec::ScoutingBandits { t0, k, .. } | AlgoSpec::ScoutingBlindits { t0, k } => t0.is_auto() || k.is_auto(),
            _ => false,
        }
    }

    fn build_for(&self, horizon: u64, cx: &BuildContext) -> Result<Box<dyn Strategy>> {
        let m = cx.distribution.and_then(|d| d.density_bound());
        Ok(match self {
            AlgoSpec::Fbp { naive_index } => Box::new(Fbp::with_mode(if *naive_index {
                IndexMode::Naive
            } else {
                IndexMode::Tree
            })),
            AlgoSpec::ScoutingBandits { bandit: BanditKind::Moss, .. } => {
                let (t0, k) = self.resolved_tuning(horizon, m)?.expect("scouting learner");
                let bandit_horizon = horizon.saturating_sub(t0).max(k);
                Box::new(ScoutingBandits::new(t0, k, Box::new(Moss::new(k as usize, bandit_horizon)?))?)
            }
            AlgoSpec::ScoutingBlindits { .. } => {
                let (t0, k) = self.resolved_tuning(horizon, m)?.expect("scouting learner");
                Box::new(ScoutingBlindits::new(t0, k)?)
            }
            AlgoSpec::FixedPrice { price } => {
                let p = match *price {
                    PriceChoice::Value(v) => Price::new(v).map_err(|e| Error::Config(e.to_string()))?,
                    PriceChoice::Named(NamedPrice::Optimal) => cx
                        .optimal_price
                        .ok_or_else(|| Error::Config("fixed_price \"optimal\" needs a stochastic environment".into()))?,
                };
                Box::new(FixedPrice::new(p))
            }
            AlgoSpec::MedianMechanism => {
                let d = cx
                    .distribution
                    .ok_or_else(|| Error::Config("median_mechanism needs a stochastic environment".into()))?;
                Box::new(MedianMechanism::new(Price::saturating(d.seller_median())))
            }
            AlgoSpec::SingleSample => Box::new(SingleSample::new()),
            AlgoSpec::UniformRandom => Box::new(UniformRandom::new()),
        })
    }

    pub fn build(&self, cx: &BuildContext) -> Result<Box<dyn Strategy>> {
        if cx.horizon_known || !self.uses_auto() {
            return self.build_for(cx.horizon, cx);
        }
        let spec = self.clone();
        let dist = cx.distribution.cloned();
        let optimal = cx.optimal_price;
        let factory: StrategyFactory = Arc::new(move |h| {
            let cx = BuildContext {
                horizon: h,
                horizon_known: true,
                distribution: dist.as_ref(),
                optimal_price: optimal,
            };
            spec.build_for(h, &cx)
        });
        Ok(Box::new(Doubling::new(factory)?))
    }

    /// Closed-form regret upper bound at horizon `t`, when one applies.
    pub fn upper_bound(&self, t: u64, density_bound: Option<f64>) -> Result<Option<f64>> {
        Ok(match self {
            AlgoSpec::Fbp { .. } => Some(oracle::bound_fbp(t)),
            AlgoSpec::ScoutingBandits { .. } => match (density_bound, self.resolved_tuning(t, density_bound)?) {
                (Some(m), Some((t0, k))) => Some(oracle::bound_sb_moss(t, t0, k, m)),
                _ => None,
            },
            AlgoSpec::ScoutingBlindits { .. } => match (density_bound, self.resolved_tuning(t, density_bound)?) {
                (Some(m), Some((t0, k))) => Some(oracle::bound_sbl(t, t0, k, m)),
                _ => None,
            },
            _ => None,
        })
    }
}
