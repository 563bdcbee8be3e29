//! Fixed-point accumulation of gains.
//!
//! Sums of `b - s` over many rounds are compared for argmax and tie
//! decisions; doing that in `f64` makes the outcome depend on summation
//! order. Gains are quantized once to multiples of `2^-100` and summed as
//! `i128`, so every evaluation order gives bit-identical totals.

const SCALE_BITS: i32 = 100;

/// A gain scaled by `2^100`. Fits totals of up to `2^27` unit gains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct GainUnits(pub i128);

impl GainUnits {
    pub const ZERO: GainUnits = GainUnits(0);

    /// Truncates toward zero below the `2^-100` resolution.
    pub fn from_f64(x: f64) -> Self {
        GainUnits((x * 2f64.powi(SCALE_BITS)) as i128)
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 * 2f64.powi(-SCALE_BITS)
    }

    /// Gain of a single trade, `max(b - s, 0)`.
    pub fn of_pair(s: f64, b: f64) -> Self {
        if b > s {
            Self::from_f64(b - s)
        } else {
            Self::ZERO
        }
    }
}

impl std::ops::Add for GainUnits {
    type Output = GainUnits;
    fn add(self, rhs: GainUnits) -> GainUnits {
        GainUnits(self.0 + rhs.0)
    }
}

impl std::ops::AddAssign for GainUnits {
    fn add_assign(&mut self, rhs: GainUnits) {
        self.0 += rhs.0;
    }
}

impl std::ops::Sub for GainUnits {
    type Output = GainUnits;
    fn sub(self, rhs: GainUnits) -> GainUnits {
        GainUnits(self.0 - rhs.0)
    }
}

impl std::iter::Sum for GainUnits {
    fn sum<I: Iterator<Item = GainUnits>>(iter: I) -> Self {
        iter.fold(GainUnits::ZERO, |a, b| a + b)
    }
}
