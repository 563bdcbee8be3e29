//! CSV writers.

use std::io::Write;
use std::path::Path;

use serde::Deserialize;
use trade_lab::env::PairDistribution;
use trade_lab::harness::Summary;
use trade_lab::Price;

/// Reference slopes for log-log overlays.
pub const REFERENCE_EXPONENTS: [(&str, f64); 4] =
    [("ref_t_1_2", 0.5), ("ref_t_2_3", 2.0 / 3.0), ("ref_t_3_4", 0.75), ("ref_t_1", 1.0)];

/// Every reference line passes through `(10^3, 10^2)`.
pub fn reference(t: f64, exponent: f64) -> f64 {
    100.0 * (t / 1000.0).powf(exponent)
}

fn opt(x: Option<f64>) -> String {
    x.map_or(String::new(), |v| v.to_string())
}

pub fn write_run(dir: &Path, s: &Summary) -> Result<(), String> {
    let err = |e: csv::Error| e.to_string();
    let traces = dir.join(format!("{}_traces.csv", s.name));
    let mut w = csv::Writer::from_path(&traces).map_err(err)?;
    w.write_record(["run_id", "rep", "t", "cumulative_reward", "pseudo_regret", "empirical_regret"])
        .map_err(err)?;
    for h in &s.horizons {
        let run_id = format!("{}_T{}", s.name, h.horizon);
        for tr in &h.traces {
            for p in &tr.points {
                w.write_record([
                    run_id.clone(),
                    tr.rep.to_string(),
                    p.t.to_string(),
                    p.cumulative_reward.to_string(),
                    p.pseudo_regret.to_string(),
                    p.empirical_regret.to_string(),
                ])
                .map_err(err)?;
            }
        }
    }
    w.flush().map_err(|e| e.to_string())?;

    let summary = dir.join(format!("{}_summary.csv", s.name));
    let mut w = csv::Writer::from_path(&summary).map_err(err)?;
    w.write_record(["T", "mean_pseudo_regret", "ci_lo", "ci_hi", "theoretical_upper_bound", "lower_bound_reference"])
        .map_err(err)?;
    for h in &s.horizons {
        let f = h.final_stats();
        w.write_record([
            h.horizon.to_string(),
            f.mean_pseudo_regret.to_string(),
            f.ci_lo.to_string(),
            f.ci_hi.to_string(),
            opt(h.theoretical_upper_bound),
            opt(h.lower_bound_reference),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| e.to_string())
}

#[derive(Deserialize)]
struct SummaryRow {
    #[serde(rename = "T")]
    t: u64,
    mean_pseudo_regret: f64,
    ci_lo: f64,
    ci_hi: f64,
}

pub fn loglog(path: &Path, out: &mut dyn Write) -> Result<(), String> {
    let mut r = csv::Reader::from_path(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let rows: Vec<SummaryRow> = r
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| format!("{}: {e}", path.display()))?;
    if rows.is_empty() {
        return Err(format!("{}: no rows", path.display()));
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["T", "log10_T", "mean_pseudo_regret", "log10_regret", "ci_lo", "ci_hi"];
    header.extend(REFERENCE_EXPONENTS.iter().map(|r| r.0));
    w.write_record(&header).map_err(|e| e.to_string())?;
    for row in rows {
        let t = row.t as f64;
        let log_r = if row.mean_pseudo_regret > 0.0 { row.mean_pseudo_regret.log10().to_string() } else { String::new() };
        let mut rec = vec![
            row.t.to_string(),
            t.log10().to_string(),
            row.mean_pseudo_regret.to_string(),
            log_r,
            row.ci_lo.to_string(),
            row.ci_hi.to_string(),
        ];
        rec.extend(REFERENCE_EXPONENTS.iter().map(|&(_, a)| reference(t, a).to_string()));
        w.write_record(&rec).map_err(|e| e.to_string())?;
    }
    w.flush().map_err(|e| e.to_string())
}

/// Expected gain on the 1001-point price grid, one column per instance.
pub fn curves(envs: &[(String, PairDistribution)], out: &mut dyn Write) -> Result<(), String> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["p".to_string()];
    header.extend(envs.iter().map(|(l, _)| l.clone()));
    w.write_record(&header).map_err(|e| e.to_string())?;
    for i in 0..=1000 {
        let p = Price::saturating(i as f64 / 1000.0);
        let mut rec = vec![p.value().to_string()];
        rec.extend(envs.iter().map(|(_, d)| d.expected_gft(p).to_string()));
        w.write_record(&rec).map_err(|e| e.to_string())?;
    }
    w.flush().map_err(|e| e.to_string())
}
