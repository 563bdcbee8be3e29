//! Horizon-based parameter choices, computed with exact integer roots so
//! that perfect powers are not pushed over by rounding.

/// Smallest `n` with `n^k >= x`.
pub fn ceil_root(x: u128, k: u32) -> u64 {
    if x <= 1 {
        return x as u64;
    }
    let guess = (x as f64).powf(1.0 / k as f64).ceil() as u64;
    let pow_ge = |n: u64| -> bool {
        let mut acc: u128 = 1;
        for _ in 0..k {
            acc = match acc.checked_mul(n as u128) {
                Some(a) => a,
                None => return true,
            };
        }
        acc >= x
    };
    let mut n = guess.max(1);
    while n > 1 && pow_ge(n - 1) {
        n -= 1;
    }
    while !pow_ge(n) {
        n += 1;
    }
    n
}

/// Scouting bandits: `(T0, K) = (ceil(T^{2/3}), ceil(T^{1/3}))`.
pub fn scouting_bandits_auto(horizon: u64) -> (u64, u64) {
    let t = horizon.max(1) as u128;
    (ceil_root(t * t, 3), ceil_root(t, 3))
}

/// Grid size when the density bound `m` is known: `ceil(M^{2/3} T^{1/3})`.
pub fn scouting_bandits_k_known_m(horizon: u64, m: f64) -> u64 {
    ((m.powf(2.0 / 3.0) * (horizon.max(1) as f64).cbrt()).ceil() as u64).max(1)
}

/// Scouting blindits: `(T0, K) = (ceil(sqrt(T) ln T / 2), ceil(T^{1/4}))`.
pub fn scouting_blindits_auto(horizon: u64) -> (u64, u64) {
    let t = horizon.max(1);
    let t0 = ((t as f64).sqrt() * (t as f64).ln() / 2.0).ceil() as u64;
    (t0.max(1), ceil_root(t as u128, 4))
}
