//! Correlated joint laws of `(S, B)`.

use rand::Rng;
use rand::RngCore;

use crate::error::{Error, Result};

const MASS_TOL: f64 = 1e-12;

/// An axis-aligned rectangle carrying a share `weight` of the total mass,
/// spread uniformly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rectangle {
    pub s_lo: f64,
    pub s_hi: f64,
    pub b_lo: f64,
    pub b_hi: f64,
    pub weight: f64,
}

impl Rectangle {
    pub fn area(&self) -> f64 {
        (self.s_hi - self.s_lo) * (self.b_hi - self.b_lo)
    }

    pub fn height(&self) -> f64 {
        self.weight / self.area()
    }

    pub fn contains(&self, s: f64, b: f64) -> bool {
        self.s_lo <= s && s <= self.s_hi && self.b_lo <= b && b <= self.b_hi
    }

    /// Conditional `P[S <= x]` inside the rectangle.
    pub fn seller_cdf(&self, x: f64) -> f64 {
        uniform_cdf(self.s_lo, self.s_hi, x)
    }

    /// Conditional `P[B <= x]` inside the rectangle.
    pub fn buyer_cdf(&self, x: f64) -> f64 {
        uniform_cdf(self.b_lo, self.b_hi, x)
    }
}

pub(crate) fn uniform_cdf(lo: f64, hi: f64, x: f64) -> f64 {
    (x.clamp(lo, hi) - lo) / (hi - lo)
}

/// `E[(p - X)^+]` for `X ~ U[lo, hi]`.
pub(crate) fn uniform_shortfall(lo: f64, hi: f64, p: f64) -> f64 {
    if p <= lo {
        0.0
    } else if p >= hi {
        p - 0.5 * (lo + hi)
    } else {
        0.5 * (p - lo).powi(2) / (hi - lo)
    }
}

/// `E[(X - p)^+]` for `X ~ U[lo, hi]`.
pub(crate) fn uniform_excess(lo: f64, hi: f64, p: f64) -> f64 {
    if p >= hi {
        0.0
    } else if p <= lo {
        0.5 * (lo + hi) - p
    } else {
        0.5 * (hi - p).powi(2) / (hi - lo)
    }
}

/// A finite mixture of uniform rectangles.
#[derive(Debug, Clone, PartialEq)]
pub struct RectangleMixtureJoint {
    rects: Vec<Rectangle>,
    cumulative: Vec<f64>,
    bound: f64,
}

impl RectangleMixtureJoint {
    /// Rectangles with zero weight are dropped. `bound` is the declared
    /// bound `M` on the joint density; overlapping rectangles add up.
    pub fn new(rects: &[Rectangle], bound: f64) -> Result<Self> {
        let mut kept = Vec::new();
        let mut mass = 0.0;
        for r in rects {
            let in_unit = 0.0 <= r.s_lo && r.s_lo < r.s_hi && r.s_hi <= 1.0 && 0.0 <= r.b_lo && r.b_lo < r.b_hi && r.b_hi <= 1.0;
            if !in_unit || !(r.weight >= 0.0) {
                return Err(Error::InvalidDistribution(format!("bad rectangle {r:?}")));
            }
            if r.weight > 0.0 {
                mass += r.weight;
                kept.push(*r);
            }
        }
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidDistribution(format!("total weight {mass} != 1")));
        }
        // Density peaks are attained at some rectangle corner.
        let peak = kept
            .iter()
            .flat_map(|r| [(r.s_lo, r.b_lo), (r.s_lo, r.b_hi), (r.s_hi, r.b_lo), (r.s_hi, r.b_hi)])
            .map(|(s, b)| {
                // nudge inward so touching rectangles are not double counted
                let probe = |ds: f64, db: f64| {
                    kept.iter()
                        .filter(|r| r.s_lo < s + ds && s + ds < r.s_hi && r.b_lo < b + db && b + db < r.b_hi)
                        .map(|r| r.height())
                        .sum::<f64>()
                };
                let h = 1e-9;
                [probe(h, h), probe(h, -h), probe(-h, h), probe(-h, -h)]
                    .into_iter()
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if peak > bound * (1.0 + MASS_TOL) {
            return Err(Error::InvalidDistribution(format!(
                "density peak {peak} exceeds declared bound {bound}"
            )));
        }
        let cumulative = kept
            .iter()
            .scan(0.0, |acc, r| {
                *acc += r.weight;
                Some(*acc)
            })
            .collect();
        Ok(RectangleMixtureJoint {
            rects: kept,
            cumulative,
            bound,
        })
    }

    pub fn rectangles(&self) -> &[Rectangle] {
        &self.rects
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn density(&self, s: f64, b: f64) -> f64 {
        self.rects.iter().filter(|r| r.contains(s, b)).map(|r| r.height()).sum()
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let u: f64 = rng.gen::<f64>() * self.cumulative[self.cumulative.len() - 1];
        let idx = self.cumulative.partition_point(|&c| c <= u).min(self.rects.len() - 1);
        let r = self.rects[idx];
        let s = r.s_lo + rng.gen::<f64>() * (r.s_hi - r.s_lo);
        let b = r.b_lo + rng.gen::<f64>() * (r.b_hi - r.b_lo);
        (s, b)
    }
}

/// Finitely many atoms in `[0, 1]^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteJoint {
    atoms: Vec<(f64, f64, f64)>,
}

impl DiscreteJoint {
    /// Atoms are `(s, b, prob)`.
    pub fn new(atoms: &[(f64, f64, f64)]) -> Result<Self> {
        let mut mass = 0.0;
        for &(s, b, prob) in atoms {
            if !(0.0..=1.0).contains(&s) || !(0.0..=1.0).contains(&b) || !(prob >= 0.0) {
                return Err(Error::InvalidDistribution(format!("bad atom ({s}, {b}, {prob})")));
            }
            mass += prob;
        }
        if atoms.is_empty() || (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidDistribution(format!("total mass {mass} != 1")));
        }
        Ok(DiscreteJoint { atoms: atoms.to_vec() })
    }

    pub fn atoms(&self) -> &[(f64, f64, f64)] {
        &self.atoms
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for &(s, b, prob) in &self.atoms {
            acc += prob;
            if u < acc {
                return (s, b);
            }
        }
        let last = self.atoms.iter().rev().find(|a| a.2 > 0.0).unwrap_or(&self.atoms[0]);
        (last.0, last.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(s_lo: f64, s_hi: f64, b_lo: f64, b_hi: f64, weight: f64) -> Rectangle {
        Rectangle { s_lo, s_hi, b_lo, b_hi, weight }
    }

    #[test]
    fn uniform_partial_moments() {
        assert!((uniform_shortfall(0.0, 1.0, 0.5) - 0.125).abs() < 1e-15);
        assert!((uniform_excess(0.0, 1.0, 0.5) - 0.125).abs() < 1e-15);
        assert!((uniform_shortfall(0.2, 0.4, 0.5) - 0.2).abs() < 1e-15);
        assert_eq!(uniform_excess(0.2, 0.4, 0.5), 0.0);
    }

    #[test]
    fn rejects_mass_and_bound_violations() {
        assert!(RectangleMixtureJoint::new(&[rect(0.0, 0.5, 0.0, 0.5, 0.9)], 10.0).is_err());
        assert!(RectangleMixtureJoint::new(&[rect(0.0, 0.5, 0.0, 0.5, 1.0)], 3.0).is_err());
        // overlapping rectangles stack
        let r = [rect(0.0, 0.5, 0.0, 0.5, 0.5), rect(0.25, 0.75, 0.25, 0.75, 0.5)];
        assert!(RectangleMixtureJoint::new(&r, 2.5).is_err());
        assert!(RectangleMixtureJoint::new(&r, 4.0).is_ok());
    }

    #[test]
    fn discrete_joint_rejects_bad_mass() {
        assert!(DiscreteJoint::new(&[(0.1, 0.2, 0.3)]).is_err());
        assert!(DiscreteJoint::new(&[]).is_err());
    }
}
