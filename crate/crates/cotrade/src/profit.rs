//! Profit proxy over shared trading dates: the signed normalized dollar
//! amount compares a trade's reported price with the same-day close, scales
//! by shares, and normalizes by the day's dollar volume (close x volume).
//! Buying below the close or selling above it counts as profit.

use std::collections::{BTreeSet, HashMap};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::{DailyQuote, Side, TradeRecord};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProfitError {
    #[error("trade has no reported price")]
    MissingPrice,
    #[error("no quote for {company} on {date}")]
    MissingQuote { company: String, date: NaiveDate },
    #[error("profit series is empty")]
    EmptySeries,
}

/// One evaluated transaction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfitPoint {
    pub insider_id: String,
    pub company: String,
    pub date: NaiveDate,
    pub side: Side,
    /// Signed normalized dollar amount, clamped to [-1, 1].
    pub amount: f64,
}

/// Trades skipped during series construction, by cause.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedCounts {
    pub missing_price: usize,
    pub missing_quote: usize,
}

impl SkippedCounts {
    pub fn total(&self) -> usize {
        self.missing_price + self.missing_quote
    }
}

/// Quote lookup keyed by (company, date).
pub struct QuoteTable {
    by_key: HashMap<(String, NaiveDate), DailyQuote>,
}

impl QuoteTable {
    pub fn new(quotes: &[DailyQuote]) -> Self {
        let by_key = quotes
            .iter()
            .map(|q| ((q.company.clone(), q.date), q.clone()))
            .collect();
        QuoteTable { by_key }
    }

    pub fn get(&self, company: &str, date: NaiveDate) -> Option<&DailyQuote> {
        self.by_key.get(&(company.to_string(), date))
    }
}

/// `s * (close - price) * shares / (close * volume)` with `s = +1` for a
/// purchase and `-1` for a sale, clamped to [-1, 1]. The quote must match
/// the trade's company and date.
pub fn signed_normalized_amount(
    trade: &TradeRecord,
    quote: &DailyQuote,
) -> Result<f64, ProfitError> {
    let price = trade.price.ok_or(ProfitError::MissingPrice)?;
    if quote.company != trade.company || quote.date != trade.date {
        return Err(ProfitError::MissingQuote {
            company: trade.company.clone(),
            date: trade.date,
        });
    }
    let sign = match trade.side {
        Side::Purchase => 1.0,
        Side::Sale => -1.0,
    };
    let raw = sign * (quote.close - price) * trade.shares as f64 / (quote.close * quote.volume as f64);
    Ok(raw.clamp(-1.0, 1.0))
}

/// One point per priced trade of the insider on a date in `dates`,
/// chronological. Trades without a price or without a matching quote are
/// skipped and counted, not errored.
pub fn profit_series(
    insider_id: &str,
    company: &str,
    side: Side,
    dates: &BTreeSet<NaiveDate>,
    trades: &[TradeRecord],
    quotes: &QuoteTable,
) -> (Vec<ProfitPoint>, SkippedCounts) {
    let mut eligible: Vec<&TradeRecord> = trades
        .iter()
        .filter(|t| {
            t.insider_id == insider_id
                && t.company == company
                && t.side == side
                && dates.contains(&t.date)
        })
        .collect();
    eligible.sort_by_key(|t| t.date);

    let mut points = Vec::new();
    let mut skipped = SkippedCounts::default();
    for trade in eligible {
        if trade.price.is_none() {
            skipped.missing_price += 1;
            continue;
        }
        let Some(quote) = quotes.get(company, trade.date) else {
            skipped.missing_quote += 1;
            continue;
        };
        let amount = signed_normalized_amount(trade, quote)
            .expect("priced trade with matching quote");
        points.push(ProfitPoint {
            insider_id: insider_id.to_string(),
            company: company.to_string(),
            date: trade.date,
            side,
            amount,
        });
    }
    (points, skipped)
}

/// Fraction of points with a strictly positive amount.
pub fn majority_profit_fraction(series: &[ProfitPoint]) -> Result<f64, ProfitError> {
    if series.is_empty() {
        return Err(ProfitError::EmptySeries);
    }
    let positive = series.iter().filter(|p| p.amount > 0.0).count();
    Ok(positive as f64 / series.len() as f64)
}

/// `insider_id,company,date,side,amount`; amounts use the shortest exact
/// float representation.
pub fn profits_to_csv(points: &[ProfitPoint]) -> String {
    let mut out = String::from("insider_id,company,date,side,amount\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.insider_id,
            p.company,
            p.date.format("%Y-%m-%d"),
            p.side.code(),
            p.amount
        ));
    }
    out
}

pub fn profits_from_csv(s: &str) -> Result<Vec<ProfitPoint>, String> {
    let mut lines = s.lines();
    let header = lines.next().ok_or("empty profits csv")?;
    if header != "insider_id,company,date,side,amount" {
        return Err(format!("bad profits header {header:?}"));
    }
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(format!("bad profits row {line:?}"));
            }
            Ok(ProfitPoint {
                insider_id: f[0].to_string(),
                company: f[1].to_string(),
                date: f[2].parse().map_err(|e| format!("{e}"))?,
                side: f[3].parse()?,
                amount: f[4].parse().map_err(|e| format!("{e}"))?,
            })
        })
        .collect()
}

/// Per-insider evaluation summary for the report JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfitSummaryEntry {
    pub insider_id: String,
    pub points: usize,
    /// None when every candidate trade was skipped.
    pub positive_fraction: Option<f64>,
    pub skipped_missing_price: usize,
    pub skipped_missing_quote: usize,
}

pub fn summary_to_json(entries: &[ProfitSummaryEntry]) -> String {
    let value = serde_json::to_value(entries).expect("summary serializes");
    serde_json::to_string_pretty(&value).expect("json value prints")
}

pub fn summary_from_json(s: &str) -> Result<Vec<ProfitSummaryEntry>, serde_json::Error> {
    serde_json::from_str(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    fn trade(side: Side, shares: u64, price: Option<f64>) -> TradeRecord {
        TradeRecord {
            insider_id: "I1".into(),
            insider_name: "I1 name".into(),
            company: "ACME".into(),
            date: d("2014-03-05"),
            side,
            shares,
            price,
        }
    }

    fn quote(close: f64, volume: u64) -> DailyQuote {
        DailyQuote {
            company: "ACME".into(),
            date: d("2014-03-05"),
            close,
            volume,
        }
    }

    #[test]
    fn purchase_below_close_is_profit() {
        let amount =
            signed_normalized_amount(&trade(Side::Purchase, 100, Some(9.0)), &quote(10.0, 1000))
                .unwrap();
        assert!((amount - 0.01).abs() < 1e-15);
    }

    #[test]
    fn sale_above_close_is_profit() {
        let amount =
            signed_normalized_amount(&trade(Side::Sale, 50, Some(12.0)), &quote(10.0, 1000))
                .unwrap();
        assert!((amount - 0.01).abs() < 1e-15);
    }

    #[test]
    fn price_equal_to_close_is_flat() {
        let amount =
            signed_normalized_amount(&trade(Side::Purchase, 100, Some(10.0)), &quote(10.0, 1000))
                .unwrap();
        assert_eq!(amount, 0.0);
    }

    #[test]
    fn all_four_sign_combinations() {
        // (side, price above close?, expected sign)
        let cases = [
            (Side::Purchase, 9.0, 1.0),
            (Side::Purchase, 11.0, -1.0),
            (Side::Sale, 11.0, 1.0),
            (Side::Sale, 9.0, -1.0),
        ];
        for (side, price, sign) in cases {
            let amount =
                signed_normalized_amount(&trade(side, 10, Some(price)), &quote(10.0, 1000))
                    .unwrap();
            assert!(
                amount * sign > 0.0,
                "{side} at {price} gave {amount}, expected sign {sign}"
            );
        }
    }

    #[test]
    fn clamping_kicks_in_when_shares_exceed_volume() {
        // |amount| <= |close-price|/close * shares/volume: make both big.
        let amount =
            signed_normalized_amount(&trade(Side::Purchase, 10_000, Some(1.0)), &quote(10.0, 100))
                .unwrap();
        assert_eq!(amount, 1.0);
        let amount =
            signed_normalized_amount(&trade(Side::Sale, 10_000, Some(1.0)), &quote(10.0, 100))
                .unwrap();
        assert_eq!(amount, -1.0);
    }

    #[test]
    fn missing_price_and_mismatched_quote_are_errors() {
        assert_eq!(
            signed_normalized_amount(&trade(Side::Sale, 10, None), &quote(10.0, 1000)),
            Err(ProfitError::MissingPrice)
        );
        let mut q = quote(10.0, 1000);
        q.date = d("2014-03-06");
        assert!(matches!(
            signed_normalized_amount(&trade(Side::Sale, 10, Some(9.0)), &q),
            Err(ProfitError::MissingQuote { .. })
        ));
    }

    fn dated_trade(date: &str, price: Option<f64>) -> TradeRecord {
        TradeRecord {
            date: d(date),
            ..trade(Side::Purchase, 100, price)
        }
    }

    fn dated_quote(date: &str) -> DailyQuote {
        DailyQuote {
            date: d(date),
            ..quote(10.0, 1000)
        }
    }

    #[test]
    fn series_is_chronological_and_counts_skips() {
        let trades = vec![
            dated_trade("2014-03-07", Some(9.0)),
            dated_trade("2014-03-05", Some(9.5)),
            dated_trade("2014-03-06", None),
            dated_trade("2014-03-10", Some(9.0)), // not in the shared dates
            dated_trade("2014-03-08", Some(9.0)), // no quote that day
        ];
        let quotes = QuoteTable::new(&[
            dated_quote("2014-03-05"),
            dated_quote("2014-03-06"),
            dated_quote("2014-03-07"),
        ]);
        let dates: BTreeSet<NaiveDate> = ["2014-03-05", "2014-03-06", "2014-03-07", "2014-03-08"]
            .iter()
            .map(|s| d(s))
            .collect();
        let (points, skipped) =
            profit_series("I1", "ACME", Side::Purchase, &dates, &trades, &quotes);
        assert_eq!(points.len(), 2);
        assert!(points[0].date < points[1].date);
        assert_eq!(skipped, SkippedCounts { missing_price: 1, missing_quote: 1 });
    }

    #[test]
    fn empty_date_set_gives_empty_series() {
        let trades = vec![dated_trade("2014-03-05", Some(9.0))];
        let quotes = QuoteTable::new(&[dated_quote("2014-03-05")]);
        let (points, skipped) = profit_series(
            "I1",
            "ACME",
            Side::Purchase,
            &BTreeSet::new(),
            &trades,
            &quotes,
        );
        assert!(points.is_empty());
        assert_eq!(skipped.total(), 0);
    }

    #[test]
    fn unpriced_shared_dates_are_fully_skipped() {
        let trades = vec![dated_trade("2014-03-05", None), dated_trade("2014-03-06", None)];
        let quotes = QuoteTable::new(&[dated_quote("2014-03-05"), dated_quote("2014-03-06")]);
        let dates: BTreeSet<NaiveDate> =
            ["2014-03-05", "2014-03-06"].iter().map(|s| d(s)).collect();
        let (points, skipped) =
            profit_series("I1", "ACME", Side::Purchase, &dates, &trades, &quotes);
        assert!(points.is_empty());
        assert_eq!(skipped.missing_price, 2);
    }

    fn point(amount: f64) -> ProfitPoint {
        ProfitPoint {
            insider_id: "I1".into(),
            company: "ACME".into(),
            date: d("2014-03-05"),
            side: Side::Sale,
            amount,
        }
    }

    #[test]
    fn majority_fraction_counts_strict_positives() {
        assert_eq!(
            majority_profit_fraction(&[point(0.1), point(0.2)]).unwrap(),
            1.0
        );
        assert_eq!(
            majority_profit_fraction(&[point(0.1), point(0.2), point(0.3), point(-0.1)]).unwrap(),
            0.75
        );
        assert_eq!(
            majority_profit_fraction(&[point(0.0), point(0.1)]).unwrap(),
            0.5
        );
        assert_eq!(majority_profit_fraction(&[]), Err(ProfitError::EmptySeries));
    }

    #[test]
    fn profits_csv_round_trips() {
        let points = vec![point(0.01), point(-0.25), point(1e-9)];
        let csv = profits_to_csv(&points);
        assert_eq!(profits_from_csv(&csv).unwrap(), points);
    }
}
