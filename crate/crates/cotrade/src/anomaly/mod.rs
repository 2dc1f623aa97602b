//! Egonet anomaly scoring: deviation from the fitted power law, local
//! outlier factor in (ln V, ln E) space, and their sum as the total outlier
//! score used for ranking.

mod lof;
mod power_law;

pub use lof::lof_scores;
pub use power_law::{fit_power_law, FitPoint, PowerLawFit};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Exec;
use crate::network::EgonetStats;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnomalyError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnomalyConfig {
    /// LOF neighborhood size; defaults to `min(10, n - 1)`.
    pub k: Option<usize>,
    /// Logarithmic binning base for the power-law fit; per-V-value medians
    /// when unset.
    pub bin_base: Option<f64>,
    /// Min-max normalize the score and LOF terms before summing.
    pub normalize: bool,
}

impl Default for AnomalyConfig {
    fn default() -> Self {
        AnomalyConfig {
            k: None,
            bin_base: None,
            normalize: false,
        }
    }
}

/// One scored ego, ranked by decreasing total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierRecord {
    pub insider_id: String,
    pub v: usize,
    pub e: usize,
    pub f_v: f64,
    pub score: f64,
    pub lof: f64,
    pub total: f64,
    pub rank: usize,
}

/// Deviation of an egonet from the fitted line:
/// `(max(E, f) / min(E, f)) * ln(|E - f| + 1)`. Zero exactly when `E = f`;
/// symmetric under swapping the two arguments.
pub fn deviation_score(e: f64, f_v: f64) -> f64 {
    let ratio = e.max(f_v) / e.min(f_v);
    ratio * ((e - f_v).abs() + 1.0).ln()
}

fn min_max_normalize(values: &mut [f64]) {
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let range = max - min;
    for v in values.iter_mut() {
        *v = if range == 0.0 { 0.0 } else { (*v - min) / range };
    }
}

/// Fits the power law over the egonet stats, scores every ego, and returns
/// the report sorted by decreasing total (ties broken by insider id) with
/// 1-based ranks.
pub fn total_outlier_scores(
    stats: &[EgonetStats],
    config: &AnomalyConfig,
    exec: Exec,
) -> Result<(PowerLawFit, Vec<OutlierRecord>), AnomalyError> {
    if stats.len() < 2 {
        return Err(AnomalyError::DegenerateInput(format!(
            "need >= 2 egonets to score, got {}",
            stats.len()
        )));
    }
    let points: Vec<(usize, f64)> = stats.iter().map(|s| (s.v, s.e as f64)).collect();
    let fit = fit_power_law(&points, config.bin_base)?;

    let feature_points: Vec<(f64, f64)> = stats
        .iter()
        .map(|s| ((s.v as f64).ln(), (s.e as f64).ln()))
        .collect();
    let k = config.k.unwrap_or_else(|| 10.min(stats.len() - 1));
    let lof = lof_scores(&feature_points, k, exec)?;

    let mut scores: Vec<f64> = stats
        .iter()
        .map(|s| deviation_score(s.e as f64, fit.eval(s.v as f64)))
        .collect();
    let mut lof = lof;
    if config.normalize {
        min_max_normalize(&mut scores);
        min_max_normalize(&mut lof);
    }

    let mut records: Vec<OutlierRecord> = stats
        .iter()
        .zip(scores.iter().zip(&lof))
        .map(|(s, (&score, &lof))| OutlierRecord {
            insider_id: s.insider_id.clone(),
            v: s.v,
            e: s.e,
            f_v: fit.eval(s.v as f64),
            score,
            lof,
            total: score + lof,
            rank: 0,
        })
        .collect();
    records.sort_by(|x, y| {
        y.total
            .total_cmp(&x.total)
            .then_with(|| x.insider_id.cmp(&y.insider_id))
    });
    for (i, r) in records.iter_mut().enumerate() {
        r.rank = i + 1;
    }
    Ok((fit, records))
}

/// `insider_id,v,e,f_v,score,lof,total,rank` with fixed 6-decimal floats.
pub fn scores_to_csv(records: &[OutlierRecord]) -> String {
    let mut out = String::from("insider_id,v,e,f_v,score,lof,total,rank\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{:.6},{:.6},{:.6},{:.6},{}\n",
            r.insider_id, r.v, r.e, r.f_v, r.score, r.lof, r.total, r.rank
        ));
    }
    out
}

pub fn scores_from_csv(s: &str) -> Result<Vec<OutlierRecord>, String> {
    let mut lines = s.lines();
    let header = lines.next().ok_or("empty scores csv")?;
    if header != "insider_id,v,e,f_v,score,lof,total,rank" {
        return Err(format!("bad scores header {header:?}"));
    }
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 8 {
                return Err(format!("bad scores row {line:?}"));
            }
            Ok(OutlierRecord {
                insider_id: f[0].to_string(),
                v: f[1].parse().map_err(|e| format!("{e}"))?,
                e: f[2].parse().map_err(|e| format!("{e}"))?,
                f_v: f[3].parse().map_err(|e| format!("{e}"))?,
                score: f[4].parse().map_err(|e| format!("{e}"))?,
                lof: f[5].parse().map_err(|e| format!("{e}"))?,
                total: f[6].parse().map_err(|e| format!("{e}"))?,
                rank: f[7].parse().map_err(|e| format!("{e}"))?,
            })
        })
        .collect()
}

/// `{exponent, intercept, points: [{median_e, v}]}` with sorted keys.
pub fn fit_to_json(fit: &PowerLawFit) -> String {
    let value = serde_json::to_value(fit).expect("fit serializes");
    serde_json::to_string_pretty(&value).expect("json value prints")
}

pub fn fit_from_json(s: &str) -> Result<PowerLawFit, serde_json::Error> {
    serde_json::from_str(s)
}
