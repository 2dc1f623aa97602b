//! Co-trading analysis of insider trade filings.
//!
//! The pipeline ingests trade and quote CSVs, builds per-(insider, company,
//! side) date sequences, connects insiders whose sequences are similar
//! (date-overlap score or shared-subsequence length), mines maximal
//! multi-way co-trading hyperedges, ranks egonets by their deviation from
//! the power law plus a local outlier factor, and evaluates flagged
//! insiders' profit over the dates they share with their peers.
//!
//! Heavy stages (pairwise similarity, hyperedge mining, egonet counting,
//! LOF) run data-parallel under the `parallel` feature (on by default) and
//! fall back to sequential loops without it; results are bit-identical
//! either way.

pub mod anomaly;
pub mod exec;
pub mod hypergraph;
pub mod ingest;
pub mod network;
pub mod profit;
pub mod similarity;
pub mod synth;
pub mod types;

pub use exec::Exec;
pub use types::{DailyQuote, DateSequence, Side, TradeRecord};
