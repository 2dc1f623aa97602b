//! Trade and quote file parsing, validation, and date-sequence construction.
//!
//! Files are UTF-8 CSV. Trades carry the header
//! `insider_id,insider_name,company,date,side,shares,price` with dates as
//! `YYYY-MM-DD`, side `P`/`S`, and an optional price. Quotes carry
//! `company,date,close,volume`. Malformed rows never abort a parse (unless
//! strict mode is on); each one is reported as a [`RowError`] with its line
//! number.

use std::collections::BTreeMap;
use std::io;

use chrono::NaiveDate;
use thiserror::Error;

use crate::types::{DailyQuote, DateSequence, Side, TradeRecord};

pub const TRADES_HEADER: &str = "insider_id,insider_name,company,date,side,shares,price";
pub const QUOTES_HEADER: &str = "company,date,close,volume";

#[derive(Debug, Clone, Copy, Default)]
pub struct IngestConfig {
    /// Refuse the whole file when any row is malformed.
    pub strict: bool,
}

/// A malformed row: where it was and why it was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowError {
    /// 1-based line number in the source file (the header is line 1).
    pub line: u64,
    pub reason: String,
}

impl std::fmt::Display for RowError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.reason)
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("stream is not readable: {0}")]
    UnreadableStream(#[from] io::Error),
    #[error("bad header: expected {expected:?}, got {got:?}")]
    InvalidHeader { expected: String, got: String },
    #[error("strict mode: {} malformed row(s), first: {}", .0.len(), .0[0])]
    StrictModeViolation(Vec<RowError>),
}

fn read_rows<R: io::Read>(
    reader: R,
    expected_header: &str,
) -> Result<(Vec<(u64, csv::StringRecord)>, Vec<RowError>), IngestError> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);

    let headers = match rdr.headers() {
        Ok(h) => h.clone(),
        Err(e) => return Err(header_or_io_error(e, expected_header)),
    };
    let got: Vec<&str> = headers.iter().collect();
    let expected: Vec<&str> = expected_header.split(',').collect();
    if got != expected {
        return Err(IngestError::InvalidHeader {
            expected: expected_header.to_string(),
            got: got.join(","),
        });
    }

    let mut rows = Vec::new();
    let mut errors = Vec::new();
    let mut iter = rdr.into_records();
    loop {
        let line = iter.reader().position().line();
        match iter.next() {
            None => break,
            Some(Ok(record)) => {
                let line = record.position().map_or(line, |p| p.line());
                rows.push((line, record));
            }
            Some(Err(e)) => {
                if let csv::ErrorKind::Io(_) = e.kind() {
                    match e.into_kind() {
                        csv::ErrorKind::Io(io_err) => {
                            return Err(IngestError::UnreadableStream(io_err))
                        }
                        _ => unreachable!(),
                    }
                }
                let line = e.position().map_or(line, |p| p.line());
                errors.push(RowError {
                    line,
                    reason: format!("unparseable row: {e}"),
                });
            }
        }
    }
    Ok((rows, errors))
}

fn header_or_io_error(e: csv::Error, expected: &str) -> IngestError {
    match e.into_kind() {
        csv::ErrorKind::Io(io_err) => IngestError::UnreadableStream(io_err),
        other => IngestError::InvalidHeader {
            expected: expected.to_string(),
            got: format!("<unreadable: {other:?}>"),
        },
    }
}

fn parse_date(s: &str) -> Result<NaiveDate, String> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|_| format!("invalid date {s:?}"))
}

/// Parses the trades file. Every well-formed row yields one [`TradeRecord`];
/// malformed rows are collected as [`RowError`]s. With `config.strict` set,
/// any malformed row fails the whole parse.
pub fn parse_trades<R: io::Read>(
    reader: R,
    config: IngestConfig,
) -> Result<(Vec<TradeRecord>, Vec<RowError>), IngestError> {
    let (rows, mut errors) = read_rows(reader, TRADES_HEADER)?;
    let mut trades = Vec::with_capacity(rows.len());

    for (line, record) in rows {
        match parse_trade_row(&record) {
            Ok(trade) => trades.push(trade),
            Err(reason) => errors.push(RowError { line, reason }),
        }
    }

    if config.strict && !errors.is_empty() {
        return Err(IngestError::StrictModeViolation(errors));
    }
    Ok((trades, errors))
}

fn parse_trade_row(record: &csv::StringRecord) -> Result<TradeRecord, String> {
    if record.len() != 7 {
        return Err(format!("expected 7 fields, got {}", record.len()));
    }
    let insider_id = record[0].trim();
    if insider_id.is_empty() {
        return Err("empty insider_id".into());
    }
    let company = record[2].trim();
    if company.is_empty() {
        return Err("empty company".into());
    }
    let date = parse_date(record[3].trim())?;
    let side: Side = record[4].trim().parse()?;
    let shares: u64 = record[5]
        .trim()
        .parse()
        .map_err(|_| format!("invalid shares {:?}", &record[5]))?;
    if shares == 0 {
        return Err("non-positive shares".into());
    }
    let price_field = record[6].trim();
    let price = if price_field.is_empty() {
        None
    } else {
        let p: f64 = price_field
            .parse()
            .map_err(|_| format!("invalid price {price_field:?}"))?;
        if !p.is_finite() || p < 0.0 {
            return Err(format!("negative price {price_field:?}"));
        }
        Some(p)
    };
    Ok(TradeRecord {
        insider_id: insider_id.to_string(),
        insider_name: record[1].to_string(),
        company: company.to_string(),
        date,
        side,
        shares,
        price,
    })
}

/// Parses the quotes file. Duplicate (company, date) rows keep the first
/// occurrence and report a [`RowError`] for the rest.
pub fn parse_quotes<R: io::Read>(
    reader: R,
) -> Result<(Vec<DailyQuote>, Vec<RowError>), IngestError> {
    let (rows, mut errors) = read_rows(reader, QUOTES_HEADER)?;
    let mut quotes = Vec::with_capacity(rows.len());
    let mut seen: BTreeMap<(String, NaiveDate), ()> = BTreeMap::new();

    for (line, record) in rows {
        match parse_quote_row(&record) {
            Ok(quote) => {
                let key = (quote.company.clone(), quote.date);
                if seen.contains_key(&key) {
                    errors.push(RowError {
                        line,
                        reason: format!("duplicate quote for {} on {}", quote.company, quote.date),
                    });
                } else {
                    seen.insert(key, ());
                    quotes.push(quote);
                }
            }
            Err(reason) => errors.push(RowError { line, reason }),
        }
    }
    Ok((quotes, errors))
}

fn parse_quote_row(record: &csv::StringRecord) -> Result<DailyQuote, String> {
    if record.len() != 4 {
        return Err(format!("expected 4 fields, got {}", record.len()));
    }
    let company = record[0].trim();
    if company.is_empty() {
        return Err("empty company".into());
    }
    let date = parse_date(record[1].trim())?;
    let close: f64 = record[2]
        .trim()
        .parse()
        .map_err(|_| format!("invalid close {:?}", &record[2]))?;
    if !close.is_finite() || close <= 0.0 {
        return Err(format!("non-positive close {:?}", &record[2]));
    }
    let volume: u64 = record[3]
        .trim()
        .parse()
        .map_err(|_| format!("invalid volume {:?}", &record[3]))?;
    if volume == 0 {
        return Err("non-positive volume".into());
    }
    Ok(DailyQuote {
        company: company.to_string(),
        date,
        close,
        volume,
    })
}

/// Canonical trades serialization: prices with two decimals, one row per
/// record in input order. `write_trades(parse_trades(x))` is a fixed point
/// on canonical files.
pub fn write_trades<W: io::Write>(writer: W, trades: &[TradeRecord]) -> io::Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(TRADES_HEADER.split(','))
        .map_err(csv_io_error)?;
    for t in trades {
        let price = t.price.map_or(String::new(), |p| format!("{p:.2}"));
        wtr.write_record([
            t.insider_id.as_str(),
            t.insider_name.as_str(),
            t.company.as_str(),
            &t.date.format("%Y-%m-%d").to_string(),
            &t.side.code().to_string(),
            &t.shares.to_string(),
            &price,
        ])
        .map_err(csv_io_error)?;
    }
    wtr.flush()
}

/// Canonical quotes serialization, closes with two decimals.
pub fn write_quotes<W: io::Write>(writer: W, quotes: &[DailyQuote]) -> io::Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(QUOTES_HEADER.split(','))
        .map_err(csv_io_error)?;
    for q in quotes {
        wtr.write_record([
            q.company.as_str(),
            &q.date.format("%Y-%m-%d").to_string(),
            &format!("{:.2}", q.close),
            &q.volume.to_string(),
        ])
        .map_err(csv_io_error)?;
    }
    wtr.flush()
}

fn csv_io_error(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io_err) => io_err,
        other => io::Error::other(format!("{other:?}")),
    }
}

/// Groups trades by (insider, company, side), drops groups with fewer than
/// `min_trades` underlying trades, and emits one sorted deduplicated
/// [`DateSequence`] per surviving group. Output is sorted by
/// (insider_id, company, side).
pub fn build_date_sequences(trades: &[TradeRecord], min_trades: usize) -> Vec<DateSequence> {
    let mut groups: BTreeMap<(&str, &str, Side), Vec<NaiveDate>> = BTreeMap::new();
    for t in trades {
        groups
            .entry((t.insider_id.as_str(), t.company.as_str(), t.side))
            .or_default()
            .push(t.date);
    }
    groups
        .into_iter()
        .filter(|(_, dates)| dates.len() >= min_trades)
        .map(|((insider, company, side), dates)| {
            DateSequence::from_dates(insider, company, side, dates)
        })
        .collect()
}
