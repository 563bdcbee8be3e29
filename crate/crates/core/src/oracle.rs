//! Independent checks of the analytic machinery.
//!
//! Nothing here reuses the partial-moment formulas of [`crate::env`]:
//! expected gains are recomputed by brute-force quadrature or simulation,
//! and the best price in hindsight by a sort-and-sweep that shares no code
//! with the learner's interval index.

use rand::RngCore;

use crate::env::{Marginal, PairDistribution};
use crate::error::{Error, Result};
use crate::exact::GainUnits;
use crate::types::{gft, Price, ValuationPair};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericEstimate {
    pub value: f64,
    /// Zero for deterministic quadrature.
    pub std_error: f64,
}

/// Quadrature nodes `(x, mass)` for one marginal, with cell edges at every
/// breakpoint and at `p` so that no cell straddles the price.
fn marginal_nodes(m: &Marginal, p: f64, n: usize) -> Vec<(f64, f64)> {
    match m {
        Marginal::Discrete(d) => d.atoms().to_vec(),
        Marginal::Piecewise(_) | Marginal::Smooth(_) => {
            let pdf = |x: f64| match m {
                Marginal::Piecewise(d) => d.pdf(x),
                Marginal::Smooth(d) => (d.pdf)(x),
                Marginal::Discrete(_) => unreachable!(),
            };
            cell_nodes(0.0, 1.0, &m.breakpoints(), p, n)
                .into_iter()
                .map(|(x, w)| (x, pdf(x) * w))
                .collect()
        }
    }
}

/// Midpoints and widths of a partition of `[lo, hi]` refined at `extra`
/// and `p`.
fn cell_nodes(lo: f64, hi: f64, extra: &[f64], p: f64, n: usize) -> Vec<(f64, f64)> {
    let mut edges: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    edges.extend(extra.iter().copied().filter(|&x| lo < x && x < hi));
    if lo < p && p < hi {
        edges.push(p);
    }
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    edges.windows(2).map(|w| (0.5 * (w[0] + w[1]), w[1] - w[0])).collect()
}

/// `sum_{s <= p} sum_{b >= p} m_s m_b (b - s)` over two node sets.
fn product_sum(sellers: &[(f64, f64)], buyers: &[(f64, f64)], p: f64) -> f64 {
    let (mut ms, mut ms_x) = (0.0, 0.0);
    for &(x, m) in sellers.iter().filter(|n| n.0 <= p) {
        ms += m;
        ms_x += m * x;
    }
    let (mut mb, mut mb_x) = (0.0, 0.0);
    for &(x, m) in buyers.iter().filter(|n| n.0 >= p) {
        mb += m;
        mb_x += m * x;
    }
    ms * mb_x - ms_x * mb
}

/// Brute-force `E[GFT(p, S, B)]` by midpoint quadrature on `n` cells per
/// axis (aligned to every breakpoint and to `p`) or by summing atoms.
///
/// Exact up to rounding for piecewise-constant densities; for smooth
/// densities the error is `O(n^-2)`.
pub fn numeric_expected_gft(d: &PairDistribution, p: Price, n: usize) -> NumericEstimate {
    let p = p.value();
    let n = n.max(1);
    let value = match d {
        PairDistribution::IndependentProduct { seller, buyer } => {
            product_sum(&marginal_nodes(seller, p, n), &marginal_nodes(buyer, p, n), p)
        }
        PairDistribution::Joint(j) => j
            .rectangles()
            .iter()
            .map(|r| {
                let h = r.height();
                let s = cell_nodes(r.s_lo, r.s_hi, &[], p, n);
                let b: Vec<(f64, f64)> = cell_nodes(r.b_lo, r.b_hi, &[], p, n)
                    .into_iter()
                    .map(|(x, w)| (x, w * h))
                    .collect();
                product_sum(&s, &b, p)
            })
            .sum(),
        PairDistribution::DiscreteJoint(j) => j
            .atoms()
            .iter()
            .map(|&(s, b, w)| w * gft(Price::saturating(p), ValuationPair { s, b }))
            .sum(),
    };
    NumericEstimate { value, std_error: 0.0 }
}

/// Sample mean of `GFT(p, S, B)` over `n` draws, with its standard error.
pub fn monte_carlo_expected_gft(d: &PairDistribution, p: Price, n: usize, rng: &mut dyn RngCore) -> NumericEstimate {
    let n = n.max(2);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..n {
        let g = gft(p, d.sample(rng));
        sum += g;
        sum_sq += g * g;
    }
    let mean = sum / n as f64;
    let var = ((sum_sq - n as f64 * mean * mean) / (n as f64 - 1.0)).max(0.0);
    NumericEstimate {
        value: mean,
        std_error: (var / n as f64).sqrt(),
    }
}

/// Residual of the pointwise decomposition
/// `GFT(p, s, b) = |[p, b]| 1{s <= p <= b} + |[s, p]| 1{s <= p <= b}`.
pub fn check_decomposition(p: f64, v: ValuationPair) -> f64 {
    let lhs = gft(Price::saturating(p), v);
    let trade = v.s <= p && p <= v.b;
    let right = if trade { (v.b.min(1.0) - p).max(0.0) } else { 0.0 };
    let left = if trade { (p - v.s.max(0.0)).max(0.0) } else { 0.0 };
    (lhs - (right + left)).abs()
}

/// Exact best fixed price in hindsight over the seller valuations, ties to
/// the smallest price, with the exact total.
pub fn empirical_best_in_hindsight_exact(pairs: &[ValuationPair]) -> Result<(Price, GainUnits)> {
    if pairs.is_empty() {
        return Err(Error::Empty("valuation sequence"));
    }
    let mut opens: Vec<(f64, GainUnits)> = Vec::with_capacity(pairs.len());
    let mut closes: Vec<(f64, GainUnits)> = Vec::with_capacity(pairs.len());
    let mut cands: Vec<f64> = Vec::with_capacity(pairs.len());
    for v in pairs {
        cands.push(v.s);
        let w = GainUnits::of_pair(v.s, v.b);
        if w > GainUnits::ZERO {
            opens.push((v.s, w));
            closes.push((v.b, w));
        }
    }
    opens.sort_by(|a, b| a.0.total_cmp(&b.0));
    closes.sort_by(|a, b| a.0.total_cmp(&b.0));
    cands.sort_by(f64::total_cmp);
    cands.dedup();

    let (mut oi, mut ci) = (0, 0);
    let mut level = GainUnits::ZERO;
    let mut best: Option<(f64, GainUnits)> = None;
    for &x in &cands {
        // closed intervals: open at s <= x, close only once b < x
        while oi < opens.len() && opens[oi].0 <= x {
            level += opens[oi].1;
            oi += 1;
        }
        while ci < closes.len() && closes[ci].0 < x {
            level = level - closes[ci].1;
            ci += 1;
        }
        if best.is_none_or(|(_, v)| level > v) {
            best = Some((x, level));
        }
    }
    let (x, v) = best.expect("non-empty candidates");
    Ok((Price::saturating(x), v))
}

pub fn empirical_best_in_hindsight(pairs: &[ValuationPair]) -> Result<(Price, f64)> {
    empirical_best_in_hindsight_exact(pairs).map(|(p, v)| (p, v.to_f64()))
}

/// Expected gain on a uniform grid of `n` prices, by quadrature.
pub fn grid_best_price(d: &PairDistribution, n: usize, cells: usize) -> (Price, f64) {
    let mut best = (Price::saturating(0.0), f64::NEG_INFINITY);
    for i in 0..n {
        let p = Price::saturating(i as f64 / (n - 1).max(1) as f64);
        let v = numeric_expected_gft(d, p, cells).value;
        if v > best.1 {
            best = (p, v);
        }
    }
    best
}

/// DKW constants behind the full-feedback upper bound.
pub const DKW_M0: f64 = 1200.0;
pub const DKW_C1: f64 = 13448.0;
pub const DKW_C2: f64 = 1.0 / 576.0;

/// `2 (2 sqrt(m0) + c1 sqrt(pi / c2))`.
pub fn fbp_constant() -> f64 {
    2.0 * (2.0 * DKW_M0.sqrt() + DKW_C1 * (std::f64::consts::PI / DKW_C2).sqrt())
}

/// Full-feedback upper bound `1/2 + c sqrt(T - 1)`.
pub fn bound_fbp(t: u64) -> f64 {
    0.5 + fbp_constant() * (t.saturating_sub(1) as f64).sqrt()
}

/// Regret bound of MOSS over `k` arms and `n` rounds, `49 sqrt(k n)`.
pub fn moss_regret_bound(k: u64, n: u64) -> f64 {
    49.0 * ((k * n) as f64).sqrt()
}

/// Scouting-bandits upper bound
/// `T0 + (4M/(K+1) + sqrt(2 pi / T0)) (T - T0) + R_{T - T0}`.
pub fn bound_sb(t: u64, t0: u64, k: u64, m: f64, bandit_bound: f64) -> f64 {
    let rest = t.saturating_sub(t0) as f64;
    t0.min(t) as f64 + (4.0 * m / (k + 1) as f64 + (2.0 * std::f64::consts::PI / t0 as f64).sqrt()) * rest + bandit_bound
}

/// [`bound_sb`] with the MOSS bound for the bandit phase.
pub fn bound_sb_moss(t: u64, t0: u64, k: u64, m: f64) -> f64 {
    bound_sb(t, t0, k, m, moss_regret_bound(k, t.saturating_sub(t0)))
}

/// `inf_eps (eps + K exp(-2 eps^2 T0))` over a log grid on `[1e-9, 1]`.
pub fn sbl_deviation_term(t0: u64, k: u64) -> f64 {
    const STEPS: usize = 4000;
    (0..=STEPS)
        .map(|i| 10f64.powf(-9.0 + 9.0 * i as f64 / STEPS as f64))
        .map(|e| e + k as f64 * (-2.0 * e * e * t0 as f64).exp())
        .fold(f64::INFINITY, f64::min)
}

/// Scouting-blindits upper bound
/// `2 K T0 + 2 (2M/K + inf_eps(eps + K exp(-2 eps^2 T0))) (T - 2 K T0)`.
pub fn bound_sbl(t: u64, t0: u64, k: u64, m: f64) -> f64 {
    let scout = 2 * k * t0;
    let rest = t.saturating_sub(scout) as f64;
    scout.min(t) as f64 + 2.0 * (2.0 * m / k as f64 + sbl_deviation_term(t0, k)) * rest
}

/// One row of the lower-bound table: regret is at least `constant * T^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    pub regime: &'static str,
    pub rate: &'static str,
    pub exponent: f64,
    pub constant: f64,
}

impl LowerBound {
    pub fn at(&self, t: u64) -> f64 {
        self.constant * (t as f64).powf(self.exponent)
    }
}

pub fn lower_bound_constants() -> [LowerBound; 5] {
    [
        LowerBound {
            regime: "full_iid",
            rate: "T^1/2",
            exponent: 0.5,
            constant: 1.0 / (8.0 * (2.0 * std::f64::consts::PI).sqrt()),
        },
        LowerBound {
            regime: "realistic_iv_bd",
            rate: "T^2/3",
            exponent: 2.0 / 3.0,
            constant: 11.0 / 672.0,
        },
        LowerBound {
            regime: "realistic_bd",
            rate: "T",
            exponent: 1.0,
            constant: 1.0 / 24.0,
        },
        LowerBound {
            regime: "realistic_iv",
            rate: "T",
            exponent: 1.0,
            constant: 1.0 / 8.0,
        },
        LowerBound {
            regime: "adversarial",
            rate: "T",
            exponent: 1.0,
            constant: 1.0 / 4.0,
        },
    ]
}

pub fn lower_bound(regime: &str) -> Option<LowerBound> {
    lower_bound_constants().into_iter().find(|r| r.regime == regime)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{bd_lower_instance, needle_instance, uniform_iid};
    use crate::strategy::Fbp;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(x: f64) -> Price {
        Price::new(x).unwrap()
    }

    fn v(s: f64, b: f64) -> ValuationPair {
        ValuationPair::new(s, b).unwrap()
    }

    #[test]
    fn numeric_examples() {
        assert!((numeric_expected_gft(&uniform_iid(), p(0.5), 10_000).value - 0.125).abs() < 1e-6);
        let bd = bd_lower_instance(0.0).unwrap();
        assert!((numeric_expected_gft(&bd, p(0.375), 1000).value - 1.0 / 3.0).abs() < 1e-6);
        assert_eq!(numeric_expected_gft(&needle_instance(0.5).unwrap(), p(0.5), 1000).value, 0.5);
    }

    #[test]
    fn analytic_matches_quadrature_on_every_family() {
        use crate::env::*;
        let (u, tilted) = one_bit_pair();
        let fams = [
            uniform_iid(),
            sqrt_lower_instance(0.5).unwrap(),
            t23_lower_instance(-0.7).unwrap(),
            bd_lower_instance(0.5).unwrap(),
            needle_instance(0.4871).unwrap(),
            cheap_seller_instance(0.01).unwrap(),
            u,
            tilted,
        ];
        for d in &fams {
            for i in 0..=1000 {
                let price = p(i as f64 / 1000.0);
                let a = d.expected_gft(price);
                let n = numeric_expected_gft(d, price, 2000).value;
                assert!((a - n).abs() <= 1e-6, "{d:?} at {}: {a} vs {n}", price.value());
            }
        }
    }

    #[test]
    fn monte_carlo_is_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let est = monte_carlo_expected_gft(&uniform_iid(), p(0.5), 200_000, &mut rng);
        assert!((est.value - 0.125).abs() < 4.0 * est.std_error);
    }

    #[test]
    fn decomposition_examples() {
        assert_eq!(check_decomposition(0.5, v(0.25, 0.75)), 0.0);
        assert_eq!(check_decomposition(0.2, v(0.25, 0.75)), 0.0);
    }

    #[test]
    fn hindsight_examples() {
        let (price, total) = empirical_best_in_hindsight(&[v(0.2, 0.8), v(0.5, 0.6)]).unwrap();
        assert_eq!(price.value(), 0.5);
        assert!((total - 0.7).abs() < 1e-15);
        assert_eq!(empirical_best_in_hindsight(&[v(0.3, 0.3)]).unwrap(), (p(0.3), 0.0));
        assert!(matches!(empirical_best_in_hindsight(&[]), Err(Error::Empty(_))));
    }

    #[test]
    fn hindsight_agrees_with_fbp_index() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut f = Fbp::new();
        let mut pairs = Vec::new();
        for _ in 0..500 {
            let pair = v(rng.gen_range(0..30) as f64 / 29.0, rng.gen());
            pairs.push(pair);
            f.push(pair);
            let (_, total) = empirical_best_in_hindsight_exact(&pairs).unwrap();
            assert_eq!(total, f.best_total());
        }
    }

    #[test]
    fn bound_constants() {
        let c = fbp_constant();
        assert!(c < 1_144_265.0 && c > 1_144_000.0);
        assert_eq!(bound_fbp(2), 0.5 + c);
        assert!((lower_bound("full_iid").unwrap().constant - 1.0 / (8.0 * (2.0 * std::f64::consts::PI).sqrt())).abs() < 1e-15);
        assert_eq!(lower_bound("adversarial").unwrap().constant, 0.25);
        assert_eq!(lower_bound("realistic_iv").unwrap().constant, 0.125);
    }

    #[test]
    fn bounds_are_monotone() {
        let mut prev = (0.0, 0.0, 0.0);
        for t in [10u64, 100, 1000, 10_000, 100_000] {
            let cur = (bound_fbp(t), bound_sb_moss(t, 50, 5, 1.0), bound_sbl(t, 20, 3, 1.0));
            assert!(cur.0 >= prev.0 && cur.1 >= prev.1 && cur.2 >= prev.2);
            prev = cur;
        }
    }
}
