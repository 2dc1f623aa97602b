//! Pairwise trading-behavior similarity: the date-overlap score `S` and the
//! longest-common-subsequence length between two insiders' date sequences.
//!
//! Both measures are defined only for two sequences of the same company and
//! side. `S` is an indicator double sum over the two date lists, squared and
//! normalized by the list sizes; since sequences hold deduplicated dates it
//! equals `|X ∩ Y|² / (|X|·|Y|)`.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::{DateSequence, Side};

/// Which pairwise criterion induces network edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimilarityMode {
    /// Date-overlap score `S` against `overlap_threshold`.
    Overlap,
    /// Longest common subsequence length against the side's threshold `t`.
    Lcs,
}

/// Subsequence semantics for the LCS measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LcsVariant {
    /// Classical longest common subsequence (not necessarily contiguous).
    #[default]
    Subsequence,
    /// Longest run of dates contiguous in both sequences.
    ContiguousRun,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityConfig {
    pub mode: SimilarityMode,
    /// Minimum `S` for an edge in Overlap mode, in [0, 1].
    pub overlap_threshold: f64,
    /// Minimum LCS length `t` for an edge in the sale network.
    pub lcs_threshold_sale: usize,
    /// Minimum LCS length `t` for an edge in the purchase network.
    pub lcs_threshold_purchase: usize,
    pub lcs_variant: LcsVariant,
}

impl Default for SimilarityConfig {
    fn default() -> Self {
        SimilarityConfig {
            mode: SimilarityMode::Lcs,
            overlap_threshold: 0.5,
            lcs_threshold_sale: 5,
            lcs_threshold_purchase: 10,
            lcs_variant: LcsVariant::Subsequence,
        }
    }
}

impl SimilarityConfig {
    pub fn lcs_threshold(&self, side: Side) -> usize {
        match side {
            Side::Sale => self.lcs_threshold_sale,
            Side::Purchase => self.lcs_threshold_purchase,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(0.0..=1.0).contains(&self.overlap_threshold) {
            return Err(format!(
                "overlap_threshold {} outside [0, 1]",
                self.overlap_threshold
            ));
        }
        if self.lcs_threshold_sale < 2 || self.lcs_threshold_purchase < 2 {
            return Err("lcs thresholds must be >= 2".into());
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimilarityError {
    #[error("sequences belong to different company/side: ({0}, {1}) vs ({2}, {3})")]
    CompanyMismatch(String, Side, String, Side),
    #[error("similarity is undefined for an empty date sequence")]
    EmptySequence,
}

fn check_same_group(x: &DateSequence, y: &DateSequence) -> Result<(), SimilarityError> {
    if x.company != y.company || x.side != y.side {
        return Err(SimilarityError::CompanyMismatch(
            x.company.clone(),
            x.side,
            y.company.clone(),
            y.side,
        ));
    }
    Ok(())
}

/// Date-overlap similarity: `(Σᵢ Σⱼ I(xᵢ, yⱼ))² / (|X|·|Y|)` where `I` is 1
/// when the two dates are equal. Symmetric, in [0, 1] for deduplicated
/// sequences.
pub fn similarity_s(x: &DateSequence, y: &DateSequence) -> Result<f64, SimilarityError> {
    check_same_group(x, y)?;
    if x.is_empty() || y.is_empty() {
        return Err(SimilarityError::EmptySequence);
    }
    let mut matches: u64 = 0;
    for xi in &x.dates {
        for yj in &y.dates {
            if xi == yj {
                matches += 1;
            }
        }
    }
    Ok((matches * matches) as f64 / (x.len() as f64 * y.len() as f64))
}

/// Length of the longest common subsequence of the two date lists under the
/// chosen variant. Symmetric; 0 when either list is empty.
pub fn lcs_length(
    x: &DateSequence,
    y: &DateSequence,
    variant: LcsVariant,
) -> Result<usize, SimilarityError> {
    check_same_group(x, y)?;
    Ok(match variant {
        LcsVariant::Subsequence => subsequence_table(&x.dates, &y.dates)[0][0],
        LcsVariant::ContiguousRun => contiguous_best(&x.dates, &y.dates).map_or(0, |w| w.len()),
    })
}

/// One longest common subsequence of the two date lists, the
/// lexicographically earliest by date when several have maximal length.
pub fn lcs_witness(
    x: &DateSequence,
    y: &DateSequence,
    variant: LcsVariant,
) -> Result<Vec<NaiveDate>, SimilarityError> {
    check_same_group(x, y)?;
    Ok(match variant {
        LcsVariant::Subsequence => subsequence_witness(&x.dates, &y.dates),
        LcsVariant::ContiguousRun => contiguous_best(&x.dates, &y.dates).unwrap_or_default(),
    })
}

/// Suffix DP table: `table[i][j]` is the LCS length of `x[i..]` and `y[j..]`.
fn subsequence_table(x: &[NaiveDate], y: &[NaiveDate]) -> Vec<Vec<usize>> {
    let (n, m) = (x.len(), y.len());
    let mut table = vec![vec![0usize; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            table[i][j] = if x[i] == y[j] {
                table[i + 1][j + 1] + 1
            } else {
                table[i + 1][j].max(table[i][j + 1])
            };
        }
    }
    table
}

/// Builds the lexicographically earliest maximal common subsequence by
/// repeatedly taking the smallest date that still leaves enough suffix to
/// reach full length.
fn subsequence_witness(x: &[NaiveDate], y: &[NaiveDate]) -> Vec<NaiveDate> {
    let table = subsequence_table(x, y);
    let mut need = table[0][0];
    let mut witness = Vec::with_capacity(need);
    let (mut i, mut j) = (0usize, 0usize);
    while need > 0 {
        let mut best: Option<(NaiveDate, usize, usize)> = None;
        for p in i..x.len() {
            for q in j..y.len() {
                if x[p] == y[q] && table[p + 1][q + 1] + 1 >= need {
                    match best {
                        Some((date, _, _)) if date <= x[p] => {}
                        _ => best = Some((x[p], p, q)),
                    }
                }
            }
        }
        let (date, p, q) = best.expect("dp table guarantees a continuation");
        witness.push(date);
        i = p + 1;
        j = q + 1;
        need -= 1;
    }
    witness
}

/// Longest run of dates contiguous in both lists; ties resolved toward the
/// lexicographically earliest run. None when there is no common date.
fn contiguous_best(x: &[NaiveDate], y: &[NaiveDate]) -> Option<Vec<NaiveDate>> {
    let (n, m) = (x.len(), y.len());
    let mut prev = vec![0usize; m + 1];
    let mut best_len = 0usize;
    let mut best_run: Option<Vec<NaiveDate>> = None;
    for i in 1..=n {
        let mut cur = vec![0usize; m + 1];
        for j in 1..=m {
            if x[i - 1] == y[j - 1] {
                cur[j] = prev[j - 1] + 1;
                if cur[j] >= best_len && cur[j] > 0 {
                    let run = x[i - cur[j]..i].to_vec();
                    let better = cur[j] > best_len
                        || best_run.as_ref().is_none_or(|b| run < *b);
                    if better {
                        best_len = cur[j];
                        best_run = Some(run);
                    }
                }
            }
        }
        prev = cur;
    }
    best_run
}
