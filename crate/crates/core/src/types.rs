//! Prices, valuations, feedback and the gain-from-trade reward.
//!
//! All comparisons are closed (`s <= p <= b`): a seller whose valuation
//! equals the posted price accepts, and so does a buyer.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A posted price in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Price(f64);

impl Price {
    pub const HALF: Price = Price(0.5);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Price(value))
        } else {
            Err(Error::PriceOutOfRange(value))
        }
    }

    /// Clamps into `[0, 1]`. NaN maps to 0.
    pub fn saturating(value: f64) -> Self {
        if value.is_nan() {
            Price(0.0)
        } else {
            Price(value.clamp(0.0, 1.0))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Price {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Price::new(v)
    }
}

impl From<Price> for f64 {
    fn from(p: Price) -> f64 {
        p.0
    }
}

/// One round's private valuations. No ordering between `s` and `b` is
/// implied; `b < s` simply means no price clears.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValuationPair {
    pub s: f64,
    pub b: f64,
}

impl ValuationPair {
    pub fn new(s: f64, b: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&b) {
            Ok(ValuationPair { s, b })
        } else {
            Err(Error::ValuationOutOfRange { s, b })
        }
    }

    /// Social welfare when `p` is posted: the seller keeps the item unless
    /// a trade happens, in which case the buyer gets it.
    pub fn social_welfare(&self, p: Price) -> f64 {
        self.s + gft(p, *self)
    }
}

/// Two prices for a weakly budget balanced mechanism: the seller receives
/// `p`, the buyer pays `p_prime`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PricePairWBB {
    p: Price,
    p_prime: Price,
}

impl PricePairWBB {
    pub fn new(p: Price, p_prime: Price) -> Result<Self> {
        if p.value() <= p_prime.value() {
            Ok(PricePairWBB { p, p_prime })
        } else {
            Err(Error::InvertedPricePair {
                p: p.value(),
                p_prime: p_prime.value(),
            })
        }
    }

    pub fn budget_balanced(p: Price) -> Self {
        PricePairWBB { p, p_prime: p }
    }

    pub fn seller_price(&self) -> Price {
        self.p
    }

    pub fn buyer_price(&self) -> Price {
        self.p_prime
    }
}

/// What the learner posts in a round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Posting {
    Single(Price),
    Pair(PricePairWBB),
}

impl Posting {
    pub fn as_pair(&self) -> PricePairWBB {
        match *self {
            Posting::Single(p) => PricePairWBB::budget_balanced(p),
            Posting::Pair(pp) => pp,
        }
    }

    pub fn reward(&self, v: ValuationPair) -> f64 {
        match *self {
            Posting::Single(p) => gft(p, v),
            Posting::Pair(pp) => gft_wbb(pp, v),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackKind {
    Full,
    Realistic,
    TradeBit,
    None,
}

impl FeedbackKind {
    pub fn name(self) -> &'static str {
        match self {
            FeedbackKind::Full => "full",
            FeedbackKind::Realistic => "realistic",
            FeedbackKind::TradeBit => "trade_bit",
            FeedbackKind::None => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Feedback {
    Full { s: f64, b: f64 },
    Realistic { seller_accepts: bool, buyer_accepts: bool },
    TradeBit { traded: bool },
    None,
}

impl Feedback {
    pub fn kind(&self) -> FeedbackKind {
        match self {
            Feedback::Full { .. } => FeedbackKind::Full,
            Feedback::Realistic { .. } => FeedbackKind::Realistic,
            Feedback::TradeBit { .. } => FeedbackKind::TradeBit,
            Feedback::None => FeedbackKind::None,
        }
    }
}

/// `(b - s) * 1{s <= p <= b}`.
#[inline]
pub fn gft(p: Price, v: ValuationPair) -> f64 {
    let p = p.value();
    if v.s <= p && p <= v.b {
        v.b - v.s
    } else {
        0.0
    }
}

/// `(b - p' + p - s) * 1{s <= p <= p' <= b}`.
#[inline]
pub fn gft_wbb(pp: PricePairWBB, v: ValuationPair) -> f64 {
    let (p, q) = (pp.p.value(), pp.p_prime.value());
    if v.s <= p && p <= q && q <= v.b {
        if p == q {
            return v.b - v.s;
        }
        (v.b - q) + (p - v.s)
    } else {
        0.0
    }
}

pub fn make_feedback(kind: FeedbackKind, p: Price, v: ValuationPair) -> Feedback {
    make_feedback_wbb(kind, PricePairWBB::budget_balanced(p), v)
}

pub fn make_feedback_wbb(kind: FeedbackKind, pp: PricePairWBB, v: ValuationPair) -> Feedback {
    let (p, q) = (pp.p.value(), pp.p_prime.value());
    match kind {
        FeedbackKind::Full => Feedback::Full { s: v.s, b: v.b },
        FeedbackKind::Realistic => Feedback::Realistic {
            seller_accepts: v.s <= p,
            buyer_accepts: q <= v.b,
        },
        FeedbackKind::TradeBit => Feedback::TradeBit {
            traded: v.s <= p && p <= q && q <= v.b,
        },
        FeedbackKind::None => Feedback::None,
    }
}
