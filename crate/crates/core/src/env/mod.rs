//! Stochastic environments: joint laws of the seller/buyer valuations,
//! their exact expected gain from trade, and population-optimal prices.

mod instances;
pub mod joint;
pub mod marginal;

use rand::RngCore;

pub use instances::{
    bd_lower_instance, cheap_seller_instance, needle_instance, one_bit_pair, sqrt_lower_instance,
    t23_lower_instance, uniform_iid, T23_THETA,
};
pub use joint::{DiscreteJoint, Rectangle, RectangleMixtureJoint};
pub use marginal::{DiscreteDistribution, Marginal, PiecewiseUniformDensity, Segment, SmoothDensity1D};

use crate::types::{Price, PricePairWBB, ValuationPair};
use joint::{uniform_excess, uniform_shortfall};

/// The law of one round's `(S, B)`. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub enum PairDistribution {
    IndependentProduct { seller: Marginal, buyer: Marginal },
    Joint(RectangleMixtureJoint),
    DiscreteJoint(DiscreteJoint),
}

/// Masses of the four closed quadrants around `(p, p)`:
/// `[S<=p, B<=p]`, `[S<=p, B>=p]`, `[S>=p, B>=p]`, `[S>=p, B<=p]`.
pub type QuadrantMasses = [f64; 4];

impl PairDistribution {
    pub fn independent(seller: Marginal, buyer: Marginal) -> Self {
        PairDistribution::IndependentProduct { seller, buyer }
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> ValuationPair {
        let (s, b) = match self {
            PairDistribution::IndependentProduct { seller, buyer } => (seller.sample(rng), buyer.sample(rng)),
            PairDistribution::Joint(j) => j.sample(rng),
            PairDistribution::DiscreteJoint(j) => j.sample(rng),
        };
        ValuationPair {
            s: s.clamp(0.0, 1.0),
            b: b.clamp(0.0, 1.0),
        }
    }

    /// Exact `E[GFT(p, S, B)]`.
    pub fn expected_gft(&self, p: Price) -> f64 {
        self.expected_gft_wbb(PricePairWBB::budget_balanced(p))
    }

    /// Exact `E[(B - p' + p - S) 1{S <= p <= p' <= B}]`.
    ///
    /// Within each independent block this splits as
    /// `P[S <= p] E[(B - p')^+] + P[B >= p'] E[(p - S)^+]`.
    pub fn expected_gft_wbb(&self, pp: PricePairWBB) -> f64 {
        let (p, q) = (pp.seller_price().value(), pp.buyer_price().value());
        match self {
            PairDistribution::IndependentProduct { seller, buyer } => {
                seller.cdf(p) * buyer.excess_above(q) + buyer.prob_ge(q) * seller.shortfall_below(p)
            }
            PairDistribution::Joint(j) => j
                .rectangles()
                .iter()
                .map(|r| {
                    r.weight
                        * (r.seller_cdf(p) * uniform_excess(r.b_lo, r.b_hi, q)
                            + (1.0 - r.buyer_cdf(q)) * uniform_shortfall(r.s_lo, r.s_hi, p))
                })
                .sum(),
            PairDistribution::DiscreteJoint(j) => j
                .atoms()
                .iter()
                .filter(|a| a.0 <= p && q <= a.1)
                .map(|a| a.2 * ((a.1 - q) + (p - a.0)))
                .sum(),
        }
    }

    /// `P[S <= p <= B]`, the probability that a single posted price trades.
    pub fn trade_probability(&self, p: f64) -> f64 {
        self.quadrant_masses(p)[1]
    }

    pub fn quadrant_masses(&self, p: f64) -> QuadrantMasses {
        match self {
            PairDistribution::IndependentProduct { seller, buyer } => {
                let (sl, sg) = (seller.cdf(p), seller.prob_ge(p));
                let (bl, bg) = (buyer.cdf(p), buyer.prob_ge(p));
                [sl * bl, sl * bg, sg * bg, sg * bl]
            }
            PairDistribution::Joint(j) => {
                let mut out = [0.0; 4];
                for r in j.rectangles() {
                    let (sl, bl) = (r.seller_cdf(p), r.buyer_cdf(p));
                    let (sg, bg) = (1.0 - sl, 1.0 - bl);
                    out[0] += r.weight * sl * bl;
                    out[1] += r.weight * sl * bg;
                    out[2] += r.weight * sg * bg;
                    out[3] += r.weight * sg * bl;
                }
                out
            }
            PairDistribution::DiscreteJoint(j) => {
                let mut out = [0.0; 4];
                for &(s, b, w) in j.atoms() {
                    out[0] += w * f64::from(u8::from(s <= p && b <= p));
                    out[1] += w * f64::from(u8::from(s <= p && b >= p));
                    out[2] += w * f64::from(u8::from(s >= p && b >= p));
                    out[3] += w * f64::from(u8::from(s >= p && b <= p));
                }
                out
            }
        }
    }

    /// Prices where `expected_gft` may have a kink or jump.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts = match self {
            PairDistribution::IndependentProduct { seller, buyer } => {
                let mut v = seller.breakpoints();
                v.extend(buyer.breakpoints());
                v
            }
            PairDistribution::Joint(j) => j
                .rectangles()
                .iter()
                .flat_map(|r| [r.s_lo, r.s_hi, r.b_lo, r.b_hi])
                .collect(),
            PairDistribution::DiscreteJoint(j) => j.atoms().iter().flat_map(|a| [a.0, a.1]).collect(),
        };
        pts.retain(|x| (0.0..=1.0).contains(x));
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Declared bound `M` on the density; `None` when some component has
    /// atoms. For independent products this is the larger marginal bound.
    pub fn density_bound(&self) -> Option<f64> {
        match self {
            PairDistribution::IndependentProduct { seller, buyer } => {
                Some(seller.density_bound()?.max(buyer.density_bound()?))
            }
            PairDistribution::Joint(j) => Some(j.bound()),
            PairDistribution::DiscreteJoint(_) => None,
        }
    }

    pub fn seller_marginal(&self) -> Option<&Marginal> {
        match self {
            PairDistribution::IndependentProduct { seller, .. } => Some(seller),
            _ => None,
        }
    }

    /// Seller median (smallest `x` with `P[S <= x] >= 1/2`).
    pub fn seller_median(&self) -> f64 {
        match self {
            PairDistribution::IndependentProduct { seller, .. } => seller.median(),
            _ => {
                let cdf = |x: f64| match self {
                    PairDistribution::Joint(j) => j.rectangles().iter().map(|r| r.weight * r.seller_cdf(x)).sum::<f64>(),
                    PairDistribution::DiscreteJoint(j) => j.atoms().iter().filter(|a| a.0 <= x).map(|a| a.2).sum(),
                    _ => unreachable!(),
                };
                if let PairDistribution::DiscreteJoint(j) = self {
                    let mut xs: Vec<f64> = j.atoms().iter().map(|a| a.0).collect();
                    xs.sort_by(f64::total_cmp);
                    return xs.into_iter().find(|&x| cdf(x) >= 0.5 - 1e-12).unwrap_or(1.0);
                }
                let (mut lo, mut hi) = (0.0f64, 1.0f64);
                while hi - lo > 1e-13 {
                    let mid = 0.5 * (lo + hi);
                    if cdf(mid) < 0.5 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                hi
            }
        }
    }

    /// A maximizer of `expected_gft` and its value.
    ///
    /// Candidates are every breakpoint plus a uniform grid of `resolution`
    /// points; the bracket around the best candidate is then refined by
    /// golden-section search. Ties go to the smallest price.
    pub fn best_price(&self, resolution: usize) -> (Price, f64) {
        let resolution = resolution.max(2);
        let mut cands = self.breakpoints();
        cands.extend((0..resolution).map(|i| i as f64 / (resolution - 1) as f64));
        cands.sort_by(f64::total_cmp);
        cands.dedup();
        let eval = |x: f64| self.expected_gft(Price::saturating(x));

        // Values within TIE_TOL count as ties so rounding noise on a plateau
        // cannot move the answer away from the smallest maximizer.
        const TIE_TOL: f64 = 1e-12;
        let mut best_i = 0;
        let mut best_v = f64::NEG_INFINITY;
        for (i, &x) in cands.iter().enumerate() {
            let v = eval(x);
            if v > best_v + TIE_TOL {
                best_v = v;
                best_i = i;
            }
        }
        let mut best_x = cands[best_i];

        // One round of golden-section refinement on each side of the best
        // candidate; the function is smooth between breakpoints.
        let lo = if best_i > 0 { cands[best_i - 1] } else { best_x };
        let hi = cands.get(best_i + 1).copied().unwrap_or(best_x);
        for (a, b) in [(lo, best_x), (best_x, hi)] {
            if b - a <= 0.0 {
                continue;
            }
            let x = golden_section_max(&eval, a, b, 1e-13);
            let v = eval(x);
            if v > best_v + TIE_TOL {
                best_v = v;
                best_x = x;
            }
        }
        (Price::saturating(best_x), best_v)
    }
}

/// Golden-section search for a maximizer of a unimodal function on `[a, b]`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
