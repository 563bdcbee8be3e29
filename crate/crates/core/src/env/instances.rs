//! Named instance families: the hard distributions behind each regret
//! lower bound, plus the simple instances used as baselines.

use super::joint::{Rectangle, RectangleMixtureJoint};
use super::marginal::{DiscreteDistribution, Marginal, PiecewiseUniformDensity, SmoothDensity1D};
use super::PairDistribution;
use crate::error::{Error, Result};

/// Half-width scale of the narrow bumps in [`t23_lower_instance`].
pub const T23_THETA: f64 = 1.0 / 48.0;

fn check_eps(eps: f64) -> Result<()> {
    if (-1.0..=1.0).contains(&eps) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("eps = {eps} outside [-1, 1]")))
    }
}

/// Independent uniform seller and buyer on `[0, 1]`.
pub fn uniform_iid() -> PairDistribution {
    let u = PiecewiseUniformDensity::uniform(0.0, 1.0).expect("uniform is valid");
    PairDistribution::independent(Marginal::Piecewise(u.clone()), Marginal::Piecewise(u))
}

/// Two-segment seller density tilted by `eps` against a fixed two-segment
/// buyer: the best price sits below 1/2 for `eps > 0` and above it for
/// `eps < 0`.
pub fn sqrt_lower_instance(eps: f64) -> Result<PairDistribution> {
    check_eps(eps)?;
    let seller = PiecewiseUniformDensity::new(
        &[(0.0, 0.25, 2.0 * (1.0 + eps)), (0.5, 0.75, 2.0 * (1.0 - eps))],
        4.0,
    )?;
    let buyer = PiecewiseUniformDensity::new(&[(0.25, 0.5, 2.0), (0.75, 1.0, 2.0)], 2.0)?;
    Ok(PairDistribution::independent(Marginal::Piecewise(seller), Marginal::Piecewise(buyer)))
}

/// Four narrow seller bumps, two of them tilted by `eps`, against four
/// narrow buyer bumps. The sign of `eps` is only revealed by posting prices
/// in the costly region right after the first seller bump.
pub fn t23_lower_instance(eps: f64) -> Result<PairDistribution> {
    check_eps(eps)?;
    let th = T23_THETA;
    let h = 1.0 / (4.0 * th);
    let seller = PiecewiseUniformDensity::new(
        &[
            (0.0, th, h * (1.0 + eps)),
            (1.0 / 6.0, 1.0 / 6.0 + th, h * (1.0 - eps)),
            (0.25, 0.25 + th, h),
            (2.0 / 3.0, 2.0 / 3.0 + th, h),
        ],
        h * (1.0 + eps.abs()),
    )?;
    let buyer = PiecewiseUniformDensity::new(
        &[
            (1.0 / 3.0 - th, 1.0 / 3.0, h),
            (0.75 - th, 0.75, h),
            (5.0 / 6.0 - th, 5.0 / 6.0, h),
            (1.0 - th, 1.0, h),
        ],
        h,
    )?;
    Ok(PairDistribution::independent(Marginal::Piecewise(seller), Marginal::Piecewise(buyer)))
}

/// The three squares of the correlated density `f`, each of side 1/8.
const BD_SQUARES: [(f64, f64, f64, f64); 3] = [
    (0.0, 0.125, 0.375, 0.5),
    (0.25, 0.375, 0.875, 1.0),
    (0.5, 0.625, 0.625, 0.75),
];

/// Mixture `(1 - lambda) f + lambda g` of two correlated bounded densities
/// with `g(s, b) = f(1 - b, 1 - s)`. Every mixture puts the same mass in each
/// quadrant around every diagonal point `(p, p)`.
pub fn bd_lower_instance(lambda: f64) -> Result<PairDistribution> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} outside [0, 1]")));
    }
    let mut rects = Vec::with_capacity(6);
    for &(s_lo, s_hi, b_lo, b_hi) in &BD_SQUARES {
        rects.push(Rectangle { s_lo, s_hi, b_lo, b_hi, weight: (1.0 - lambda) / 3.0 });
    }
    // reflection (s, b) -> (1 - b, 1 - s)
    for &(s_lo, s_hi, b_lo, b_hi) in &BD_SQUARES {
        rects.push(Rectangle {
            s_lo: 1.0 - b_hi,
            s_hi: 1.0 - b_lo,
            b_lo: 1.0 - s_hi,
            b_hi: 1.0 - s_lo,
            weight: lambda / 3.0,
        });
    }
    Ok(PairDistribution::Joint(RectangleMixtureJoint::new(&rects, 64.0 / 3.0)?))
}

/// Seller is `x` or `0`, buyer is `x` or `1`, each with probability 1/2.
pub fn needle_instance(x: f64) -> Result<PairDistribution> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::InvalidParameter(format!("x = {x} outside (0, 1)")));
    }
    let seller = DiscreteDistribution::new(&[(0.0, 0.5), (x, 0.5)])?;
    let buyer = DiscreteDistribution::new(&[(x, 0.5), (1.0, 0.5)])?;
    Ok(PairDistribution::independent(Marginal::Discrete(seller), Marginal::Discrete(buyer)))
}

/// Seller is `0` or `eps` with equal probability, buyer always values 1.
pub fn cheap_seller_instance(eps: f64) -> Result<PairDistribution> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps = {eps} outside (0, 1)")));
    }
    let seller = DiscreteDistribution::new(&[(0.0, 0.5), (eps, 0.5)])?;
    let buyer = DiscreteDistribution::point(1.0)?;
    Ok(PairDistribution::independent(Marginal::Discrete(seller), Marginal::Discrete(buyer)))
}

fn tilted_seller_pdf(s: f64) -> f64 {
    let den = s * s * s - s * s + 4.0;
    4.0 * (4.0 - 2.0 * s * s * s + s * s) / (den * den)
}

fn tilted_seller_cdf(s: f64) -> f64 {
    4.0 * s / (s * s * s - s * s + 4.0)
}

fn tilted_buyer_pdf(b: f64) -> f64 {
    b * (b - 0.5) * (b - 1.0) + 1.0
}

fn tilted_buyer_cdf(b: f64) -> f64 {
    let b2 = b * b;
    b2 * b2 / 4.0 - b2 * b / 2.0 + b2 / 4.0 + b
}

fn tilted_buyer_cdf_integral(b: f64) -> f64 {
    let b2 = b * b;
    b2 * b2 * b / 20.0 - b2 * b2 / 8.0 + b2 * b / 12.0 + b2 / 2.0
}

/// Two independent-valuation instances with identical trade probability
/// `P[S <= p <= B]` at every price but different best prices: uniform
/// seller and buyer, and a pair of smooth tilted densities.
pub fn one_bit_pair() -> (PairDistribution, PairDistribution) {
    let seller = SmoothDensity1D::new("tilted_seller", tilted_seller_pdf, tilted_seller_cdf, None, 2.0)
        .expect("tilted seller density is valid");
    let buyer = SmoothDensity1D::new(
        "tilted_buyer",
        tilted_buyer_pdf,
        tilted_buyer_cdf,
        Some(tilted_buyer_cdf_integral),
        2.0,
    )
    .expect("tilted buyer density is valid");
    (
        uniform_iid(),
        PairDistribution::independent(Marginal::Smooth(seller), Marginal::Smooth(buyer)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Price;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(x: f64) -> Price {
        Price::saturating(x)
    }

    fn seller_segments(d: &PairDistribution) -> Vec<(f64, f64, f64)> {
        match d {
            PairDistribution::IndependentProduct { seller: Marginal::Piecewise(s), .. } => {
                s.segments().iter().map(|g| (g.lo, g.hi, g.height)).collect()
            }
            _ => panic!("expected piecewise seller"),
        }
    }

    #[test]
    fn sqrt_instance_shapes() {
        let d0 = sqrt_lower_instance(0.0).unwrap();
        assert_eq!(seller_segments(&d0), vec![(0.0, 0.25, 2.0), (0.5, 0.75, 2.0)]);
        let d1 = sqrt_lower_instance(1.0).unwrap();
        assert_eq!(seller_segments(&d1)[0].2, 4.0);
        assert_eq!(seller_segments(&d1)[1].2, 0.0);
        assert_eq!(d0.density_bound(), Some(4.0));
        assert!(sqrt_lower_instance(1.5).is_err());
    }

    #[test]
    fn sqrt_instance_gap_follows_sign() {
        // frozen from a brute-force midpoint double integral
        let plus = sqrt_lower_instance(0.5).unwrap();
        let minus = sqrt_lower_instance(-0.5).unwrap();
        assert!((plus.expected_gft(p(0.25)) - 0.375).abs() < 1e-12);
        assert!((plus.expected_gft(p(0.75)) - 0.3125).abs() < 1e-12);
        assert!((minus.expected_gft(p(0.25)) - 0.125).abs() < 1e-12);
        assert!((minus.expected_gft(p(0.75)) - 0.1875).abs() < 1e-12);
    }

    #[test]
    fn t23_best_price_regions() {
        // regions a2 = [13/48, 5/16] and a3 = [11/16, 35/48]
        let (bp, _) = t23_lower_instance(0.7).unwrap().best_price(1001);
        assert!((13.0 / 48.0..=5.0 / 16.0).contains(&bp.value()), "{bp:?}");
        let (bp, _) = t23_lower_instance(-0.7).unwrap().best_price(1001);
        assert!((11.0 / 16.0..=35.0 / 48.0).contains(&bp.value()), "{bp:?}");
    }

    #[test]
    fn t23_instance_shapes() {
        let d = t23_lower_instance(0.0).unwrap();
        for seg in seller_segments(&d) {
            assert!((seg.2 - 12.0).abs() < 1e-12);
        }
        let d = t23_lower_instance(0.7).unwrap();
        let s = seller_segments(&d);
        assert!((s[0].2 * (s[0].1 - s[0].0) - 1.7 / 4.0).abs() < 1e-12);
        assert!((d.density_bound().unwrap() - 12.0 * 1.7).abs() < 1e-12);
    }

    #[test]
    fn bd_instance_values() {
        let f = bd_lower_instance(0.0).unwrap();
        assert!((f.expected_gft(p(0.375)) - 1.0 / 3.0).abs() < 1e-15);
        assert!((f.expected_gft(p(0.625)) - 0.25).abs() < 1e-15);
        let g = bd_lower_instance(1.0).unwrap();
        assert!((g.expected_gft(p(0.625)) - 1.0 / 3.0).abs() < 1e-15);
        assert!((g.expected_gft(p(0.375)) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn bd_quadrants_at_half() {
        for lambda in [0.0, 1.0] {
            let q = bd_lower_instance(lambda).unwrap().quadrant_masses(0.5);
            let expect = [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0];
            for k in 0..4 {
                assert!((q[k] - expect[k]).abs() < 1e-12, "lambda={lambda} {q:?}");
            }
        }
    }

    #[test]
    fn bd_samples_stay_in_f_squares() {
        let d = bd_lower_instance(0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let v = d.sample(&mut rng);
            assert!(BD_SQUARES
                .iter()
                .any(|&(a, b, c, e)| a <= v.s && v.s <= b && c <= v.b && v.b <= e));
        }
    }

    #[test]
    fn needle_values() {
        let x = 0.5;
        let d = needle_instance(x).unwrap();
        assert!((d.expected_gft(p(0.5)) - 0.5).abs() < 1e-15);
        assert!((d.expected_gft(p(0.3)) - 0.375).abs() < 1e-15);
        for &x in &[0.2, 0.4871, 0.8] {
            let d = needle_instance(x).unwrap();
            assert!((d.expected_gft(p(x)) - 0.5).abs() < 1e-15);
            assert!((d.expected_gft(p(x / 2.0)) - (1.0 + x) / 4.0).abs() < 1e-15);
            assert!((d.expected_gft(p((1.0 + x) / 2.0)) - (2.0 - x) / 4.0).abs() < 1e-15);
        }
        assert!(needle_instance(0.0).is_err());
    }

    #[test]
    fn needle_atom_frequencies() {
        let d = needle_instance(0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            let v = d.sample(&mut rng);
            let i = usize::from(v.s == 0.5) * 2 + usize::from(v.b == 1.0);
            counts[i] += 1;
        }
        for c in counts {
            assert!((c as f64 / n as f64 - 0.25).abs() < 0.005);
        }
    }

    #[test]
    fn cheap_seller_values() {
        let d = cheap_seller_instance(0.01).unwrap();
        assert!((d.expected_gft(p(0.01)) - 0.995).abs() < 1e-12);
        assert!((d.expected_gft(p(0.0)) - 0.5).abs() < 1e-12);
        let (bp, v) = d.best_price(1001);
        assert_eq!(bp.value(), 0.01);
        assert!((v - 0.995).abs() < 1e-12);
    }

    #[test]
    fn one_bit_cdfs_and_identity() {
        let (u, t) = one_bit_pair();
        assert!((tilted_seller_cdf(1.0) - 1.0).abs() < 1e-15);
        assert!((tilted_buyer_cdf(1.0) - 1.0).abs() < 1e-15);
        for &x in &[0.1, 0.25, 0.5, 0.9] {
            let a = u.trade_probability(x);
            let b = t.trade_probability(x);
            assert!((a - x * (1.0 - x)).abs() < 1e-12);
            assert!((b - x * (1.0 - x)).abs() < 1e-12);
        }
    }

    #[test]
    fn tilted_buyer_integral_matches_quadrature() {
        let q = super::super::marginal::adaptive_simpson(tilted_buyer_cdf, 0.0, 0.7, 1e-15);
        assert!((q - tilted_buyer_cdf_integral(0.7)).abs() < 1e-13);
    }
}
