//! Domain types shared across the pipeline.

use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

/// Transaction side of a filing: insiders either buy or sell their own
/// company's stock. Networks, hypergraphs, and scores are built per side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Purchase,
    Sale,
}

impl Side {
    /// Single-letter code used in the trades file (`P` / `S`).
    pub fn code(self) -> char {
        match self {
            Side::Purchase => 'P',
            Side::Sale => 'S',
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Purchase => "purchase",
            Side::Sale => "sale",
        }
    }
}

impl FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "P" => Ok(Side::Purchase),
            "S" => Ok(Side::Sale),
            "purchase" => Ok(Side::Purchase),
            "sale" => Ok(Side::Sale),
            other => Err(format!("unknown side {other:?} (expected P or S)")),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One Form-4-derived transaction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeRecord {
    pub insider_id: String,
    pub insider_name: String,
    pub company: String,
    pub date: NaiveDate,
    pub side: Side,
    /// Always positive; zero-share rows are rejected at parse time.
    pub shares: u64,
    /// Per-share price. Filings do not always carry one; priceless trades
    /// still participate in network construction but are skipped when
    /// evaluating profit.
    pub price: Option<f64>,
}

/// One end-of-day quote for a company.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailyQuote {
    pub company: String,
    pub date: NaiveDate,
    pub close: f64,
    pub volume: u64,
}

/// The per-(insider, company, side) unit of similarity analysis: the
/// insider's distinct trading dates, sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateSequence {
    pub insider_id: String,
    pub company: String,
    pub side: Side,
    /// Strictly increasing, no duplicates.
    pub dates: Vec<NaiveDate>,
    /// Number of underlying trades before same-day deduplication. The
    /// minimum-trade filter applies to this count, not to `dates.len()`.
    pub trade_count: usize,
}

impl DateSequence {
    /// Builds a sequence from raw (possibly repeated, unsorted) dates.
    pub fn from_dates(
        insider_id: impl Into<String>,
        company: impl Into<String>,
        side: Side,
        mut dates: Vec<NaiveDate>,
    ) -> Self {
        let trade_count = dates.len();
        dates.sort_unstable();
        dates.dedup();
        DateSequence {
            insider_id: insider_id.into(),
            company: company.into(),
            side,
            dates,
            trade_count,
        }
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }
}
