//! One-dimensional laws on `[0, 1]` used as seller or buyer marginals.
//!
//! Every marginal exposes the four quantities the independent-valuation
//! form of the expected gain from trade needs: `P[X <= p]`, `P[X >= p]`,
//! `E[(X - p)^+]` and `E[(p - X)^+]`.

use rand::Rng;
use rand::RngCore;

use crate::error::{Error, Result};

const MASS_TOL: f64 = 1e-12;

/// A density that is constant on finitely many disjoint segments.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseUniformDensity {
    segments: Vec<Segment>,
    /// Cumulative mass at the right end of each segment.
    cumulative: Vec<f64>,
    bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub height: f64,
}

impl PiecewiseUniformDensity {
    /// `segments` are `(lo, hi, height)` triples; `bound` is the declared
    /// upper bound `M` on the density.
    pub fn new(segments: &[(f64, f64, f64)], bound: f64) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidDistribution("no segments".into()));
        }
        let mut prev_hi = 0.0;
        let mut out = Vec::with_capacity(segments.len());
        let mut cumulative = Vec::with_capacity(segments.len());
        let mut mass = 0.0;
        for &(lo, hi, height) in segments {
            if !(lo < hi) || lo < 0.0 || hi > 1.0 {
                return Err(Error::InvalidDistribution(format!(
                    "segment [{lo}, {hi}] is empty or leaves [0, 1]"
                )));
            }
            if lo < prev_hi {
                return Err(Error::InvalidDistribution(format!(
                    "segment [{lo}, {hi}] overlaps or is out of order"
                )));
            }
            if !(height >= 0.0) || !height.is_finite() {
                return Err(Error::InvalidDistribution(format!("bad height {height}")));
            }
            if height > bound * (1.0 + MASS_TOL) {
                return Err(Error::InvalidDistribution(format!(
                    "height {height} exceeds declared bound {bound}"
                )));
            }
            prev_hi = hi;
            mass += height * (hi - lo);
            cumulative.push(mass);
            out.push(Segment { lo, hi, height });
        }
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidDistribution(format!("total mass {mass} != 1")));
        }
        Ok(PiecewiseUniformDensity {
            segments: out,
            cumulative,
            bound,
        })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        let h = 1.0 / (hi - lo);
        Self::new(&[(lo, hi, h)], h)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn pdf(&self, x: f64) -> f64 {
        // Segments may touch; the left one wins at a shared endpoint.
        self.segments
            .iter()
            .find(|seg| seg.lo <= x && x <= seg.hi)
            .map_or(0.0, |seg| seg.height)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.segments
            .iter()
            .map(|seg| seg.height * (x.clamp(seg.lo, seg.hi) - seg.lo))
            .sum()
    }

    /// `E[(p - X)^+] = \int_0^p F`.
    pub fn shortfall_below(&self, p: f64) -> f64 {
        self.segments
            .iter()
            .filter(|seg| p > seg.lo)
            .map(|seg| {
                let m = seg.hi.min(p);
                0.5 * seg.height * ((p - seg.lo).powi(2) - (p - m).powi(2))
            })
            .sum()
    }

    /// `E[(X - p)^+] = \int_p^1 (1 - F)`.
    pub fn excess_above(&self, p: f64) -> f64 {
        self.segments
            .iter()
            .filter(|seg| seg.hi > p)
            .map(|seg| {
                let m = seg.lo.max(p);
                0.5 * seg.height * ((seg.hi - p).powi(2) - (m - p).powi(2))
            })
            .sum()
    }

    /// Inverse-CDF draw from one uniform variate.
    pub fn quantile(&self, u: f64) -> f64 {
        let idx = self.cumulative.partition_point(|&c| c <= u);
        let idx = idx.min(self.segments.len() - 1);
        // Skip trailing zero-mass segments that rounding could land on.
        let idx = (0..=idx)
            .rev()
            .find(|&i| self.segments[i].height > 0.0)
            .unwrap_or(idx);
        let seg = self.segments[idx];
        let start = if idx == 0 { 0.0 } else { self.cumulative[idx - 1] };
        (seg.lo + (u - start) / seg.height).clamp(seg.lo, seg.hi)
    }
}

/// Finitely many atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    atoms: Vec<(f64, f64)>,
}

impl DiscreteDistribution {
    pub fn new(atoms: &[(f64, f64)]) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("no atoms".into()));
        }
        let mut sorted: Vec<(f64, f64)> = atoms.to_vec();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in sorted.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidDistribution(format!("duplicate atom {}", w[0].0)));
            }
        }
        let mut mass = 0.0;
        for &(x, prob) in &sorted {
            if !(0.0..=1.0).contains(&x) || !(prob >= 0.0) {
                return Err(Error::InvalidDistribution(format!("bad atom ({x}, {prob})")));
            }
            mass += prob;
        }
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidDistribution(format!("total mass {mass} != 1")));
        }
        Ok(DiscreteDistribution { atoms: sorted })
    }

    pub fn point(x: f64) -> Result<Self> {
        Self::new(&[(x, 1.0)])
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.atoms.iter().filter(|a| a.0 <= x).map(|a| a.1).sum()
    }

    pub fn prob_ge(&self, x: f64) -> f64 {
        self.atoms.iter().filter(|a| a.0 >= x).map(|a| a.1).sum()
    }

    pub fn shortfall_below(&self, p: f64) -> f64 {
        self.atoms.iter().filter(|a| a.0 < p).map(|a| a.1 * (p - a.0)).sum()
    }

    pub fn excess_above(&self, p: f64) -> f64 {
        self.atoms.iter().filter(|a| a.0 > p).map(|a| a.1 * (a.0 - p)).sum()
    }

    pub fn quantile(&self, u: f64) -> f64 {
        let mut acc = 0.0;
        for &(x, prob) in &self.atoms {
            acc += prob;
            if u < acc {
                return x;
            }
        }
        self.atoms.iter().rev().find(|a| a.1 > 0.0).map_or(self.atoms[0].0, |a| a.0)
    }

    /// Smallest `x` with `P[X <= x] >= 1/2`.
    pub fn median(&self) -> f64 {
        let mut acc = 0.0;
        for &(x, prob) in &self.atoms {
            acc += prob;
            if acc >= 0.5 - MASS_TOL {
                return x;
            }
        }
        self.atoms[self.atoms.len() - 1].0
    }
}

/// A smooth law given by closed-form pdf and CDF.
///
/// `cdf_integral`, when present, is the antiderivative `x -> \int_0^x F`;
/// otherwise that integral is evaluated by adaptive Simpson quadrature.
#[derive(Debug, Clone, Copy)]
pub struct SmoothDensity1D {
    pub label: &'static str,
    pub pdf: fn(f64) -> f64,
    pub cdf: fn(f64) -> f64,
    pub cdf_integral: Option<fn(f64) -> f64>,
    pub bound: f64,
}

impl PartialEq for SmoothDensity1D {
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label
    }
}

impl SmoothDensity1D {
    pub fn new(
        label: &'static str,
        pdf: fn(f64) -> f64,
        cdf: fn(f64) -> f64,
        cdf_integral: Option<fn(f64) -> f64>,
        bound: f64,
    ) -> Result<Self> {
        if (cdf(0.0)).abs() > MASS_TOL || (cdf(1.0) - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidDistribution(format!(
                "{label}: cdf(0) = {}, cdf(1) = {}",
                cdf(0.0),
                cdf(1.0)
            )));
        }
        let n = 1000;
        let mut prev = cdf(0.0);
        for i in 1..=n {
            let x = i as f64 / n as f64;
            let c = cdf(x);
            let f = pdf(x);
            if c < prev - MASS_TOL || f < 0.0 || f > bound * (1.0 + MASS_TOL) {
                return Err(Error::InvalidDistribution(format!(
                    "{label}: cdf decreasing or pdf out of [0, {bound}] near {x}"
                )));
            }
            prev = c;
        }
        Ok(SmoothDensity1D {
            label,
            pdf,
            cdf,
            cdf_integral,
            bound,
        })
    }

    fn integral_cdf(&self, x: f64) -> f64 {
        match self.cdf_integral {
            Some(f) => f(x) - f(0.0),
            None => adaptive_simpson(self.cdf, 0.0, x, 1e-15),
        }
    }

    pub fn shortfall_below(&self, p: f64) -> f64 {
        self.integral_cdf(p)
    }

    pub fn excess_above(&self, p: f64) -> f64 {
        (1.0 - p) - (self.integral_cdf(1.0) - self.integral_cdf(p))
    }

    /// Bisection on the CDF down to a bracket width of 1e-12.
    pub fn quantile(&self, u: f64) -> f64 {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if (self.cdf)(mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Adaptive Simpson quadrature on `[a, b]`.
pub fn adaptive_simpson(f: fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(f: fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// A seller or buyer marginal.
#[derive(Debug, Clone, PartialEq)]
pub enum Marginal {
    Piecewise(PiecewiseUniformDensity),
    Discrete(DiscreteDistribution),
    Smooth(SmoothDensity1D),
}

impl Marginal {
    /// `P[X <= x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Marginal::Piecewise(d) => d.cdf(x),
            Marginal::Discrete(d) => d.cdf(x),
            Marginal::Smooth(d) => (d.cdf)(x.clamp(0.0, 1.0)),
        }
    }

    /// `P[X >= x]`.
    pub fn prob_ge(&self, x: f64) -> f64 {
        match self {
            Marginal::Discrete(d) => d.prob_ge(x),
            _ => 1.0 - self.cdf(x),
        }
    }

    /// `E[(p - X)^+]`.
    pub fn shortfall_below(&self, p: f64) -> f64 {
        match self {
            Marginal::Piecewise(d) => d.shortfall_below(p),
            Marginal::Discrete(d) => d.shortfall_below(p),
            Marginal::Smooth(d) => d.shortfall_below(p),
        }
    }

    /// `E[(X - p)^+]`.
    pub fn excess_above(&self, p: f64) -> f64 {
        match self {
            Marginal::Piecewise(d) => d.excess_above(p),
            Marginal::Discrete(d) => d.excess_above(p),
            Marginal::Smooth(d) => d.excess_above(p),
        }
    }

    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            Marginal::Piecewise(d) => d.quantile(u),
            Marginal::Discrete(d) => d.quantile(u),
            Marginal::Smooth(d) => d.quantile(u),
        }
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.gen::<f64>())
    }

    /// Points where the law or its density changes.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Marginal::Piecewise(d) => d.segments().iter().flat_map(|s| [s.lo, s.hi]).collect(),
            Marginal::Discrete(d) => d.atoms().iter().map(|a| a.0).collect(),
            Marginal::Smooth(_) => vec![0.0, 1.0],
        }
    }

    /// Declared density bound; `None` for laws with atoms.
    pub fn density_bound(&self) -> Option<f64> {
        match self {
            Marginal::Piecewise(d) => Some(d.bound()),
            Marginal::Discrete(_) => None,
            Marginal::Smooth(d) => Some(d.bound),
        }
    }

    /// Smallest `x` with `P[X <= x] >= 1/2`.
    pub fn median(&self) -> f64 {
        match self {
            Marginal::Discrete(d) => d.median(),
            _ => {
                let (mut lo, mut hi) = (0.0f64, 1.0f64);
                while hi - lo > 1e-13 {
                    let mid = 0.5 * (lo + hi);
                    if self.cdf(mid) < 0.5 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                hi
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_mass() {
        let err = PiecewiseUniformDensity::new(&[(0.0, 1.0, 0.9)], 1.0).unwrap_err();
        assert!(matches!(err, Error::InvalidDistribution(_)));
        assert!(DiscreteDistribution::new(&[(0.1, 0.5), (0.2, 0.4)]).is_err());
    }

    #[test]
    fn rejects_overlap_and_bound() {
        assert!(PiecewiseUniformDensity::new(&[(0.0, 0.6, 1.0), (0.5, 0.9, 1.0)], 2.0).is_err());
        assert!(PiecewiseUniformDensity::new(&[(0.0, 0.5, 2.0)], 1.5).is_err());
        assert!(DiscreteDistribution::new(&[(0.1, 0.5), (0.1, 0.5)]).is_err());
    }

    #[test]
    fn piecewise_moments_match_uniform_closed_forms() {
        let u = PiecewiseUniformDensity::uniform(0.0, 1.0).unwrap();
        for &p in &[0.0, 0.2, 0.5, 0.9, 1.0] {
            assert!((u.cdf(p) - p).abs() < 1e-15);
            assert!((u.shortfall_below(p) - p * p / 2.0).abs() < 1e-15);
            assert!((u.excess_above(p) - (1.0 - p).powi(2) / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        let d = PiecewiseUniformDensity::new(&[(0.0, 0.25, 3.0), (0.5, 0.75, 1.0)], 3.0).unwrap();
        for i in 0..100 {
            let u = i as f64 / 100.0;
            let x = d.quantile(u);
            assert!((d.cdf(x) - u).abs() < 1e-12, "u={u} x={x}");
        }
    }

    #[test]
    fn quantile_skips_zero_mass_segments() {
        let d = PiecewiseUniformDensity::new(&[(0.0, 0.25, 4.0), (0.5, 0.75, 0.0)], 4.0).unwrap();
        assert!(d.quantile(0.999_999_999) <= 0.25);
    }

    #[test]
    fn discrete_closed_inequalities() {
        let d = DiscreteDistribution::new(&[(0.0, 0.5), (0.4, 0.5)]).unwrap();
        assert_eq!(d.cdf(0.4), 1.0);
        assert_eq!(d.prob_ge(0.4), 0.5);
        assert_eq!(d.median(), 0.0);
        assert!((d.shortfall_below(0.5) - 0.5 * 0.5 - 0.5 * 0.1).abs() < 1e-15);
        assert!((d.excess_above(0.2) - 0.5 * 0.2).abs() < 1e-15);
    }

    #[test]
    fn simpson_integrates_polynomials() {
        let v = adaptive_simpson(|x| x * x * x, 0.0, 1.0, 1e-15);
        assert!((v - 0.25).abs() < 1e-15);
    }
}
