//! Aggregation across replications and power-law fits.

use serde::{Deserialize, Serialize};

use super::RegretTrace;
use crate::error::{Error, Result};

/// Normal-approximation 95% quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckpointStats {
    pub t: u64,
    pub mean_reward: f64,
    pub mean_pseudo_regret: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub mean_empirical_regret: f64,
    pub empirical_ci_lo: f64,
    pub empirical_ci_hi: f64,
}

/// Mean and 95% normal CI. One sample gives a zero-width interval.
pub fn mean_ci(xs: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, mean, mean);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let half = Z95 * (var / n).sqrt();
    (mean, mean - half, mean + half)
}

/// Per-checkpoint statistics; traces must share a checkpoint grid.
pub(crate) fn aggregate(traces: &[RegretTrace]) -> Vec<CheckpointStats> {
    let n_cp = traces[0].points.len();
    (0..n_cp)
        .map(|i| {
            let col = |f: fn(&super::TracePoint) -> f64| traces.iter().map(|tr| f(&tr.points[i])).collect::<Vec<_>>();
            let (mean_reward, _, _) = mean_ci(&col(|p| p.cumulative_reward));
            let (mp, lo, hi) = mean_ci(&col(|p| p.pseudo_regret));
            let (me, elo, ehi) = mean_ci(&col(|p| p.empirical_regret));
            CheckpointStats {
                t: traces[0].points[i].t,
                mean_reward,
                mean_pseudo_regret: mp,
                ci_lo: lo,
                ci_hi: hi,
                mean_empirical_regret: me,
                empirical_ci_lo: elo,
                empirical_ci_hi: ehi,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least squares on `(ln T, ln regret)`; non-positive regrets are dropped.
pub fn fit_slope(points: &[(u64, f64)]) -> Result<SlopeFit> {
    let xy: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(t, r)| t > 0 && r > 0.0 && r.is_finite())
        .map(|&(t, r)| ((t as f64).ln(), r.ln()))
        .collect();
    if xy.len() < 3 {
        return Err(Error::TooFewPoints(xy.len()));
    }
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = xy.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("all horizons are equal".into()));
    }
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(SlopeFit {
        exponent,
        intercept,
        r_squared,
    })
}
