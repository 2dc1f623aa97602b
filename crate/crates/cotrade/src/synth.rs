//! Synthetic trade datasets with controllable background noise and planted
//! structures (cliques, bridging hubs, profit-biased groups), so the whole
//! pipeline is testable without any real filing data.
//!
//! All randomness flows from one 64-bit seed through splitmix-derived
//! per-unit streams: each company's background, each clique, and each hub
//! draws from its own generator, so per-company generation can run in
//! parallel while output stays byte-identical.
//!
//! Background insiders draw their trade dates independently from the
//! company's weekday calendar. For two insiders with `k` draws each over an
//! `m`-day calendar the expected shared-date count is about `k²/m`, and the
//! chance of an accidental shared subsequence of length `t` is roughly
//! `C(k,t) · (k/m)^t` — negligible for the defaults (k≈10, m≈250, t≥5),
//! so planted structures dominate the mined output.

use chrono::{Datelike, NaiveDate, Weekday};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::{map_ordered, Exec};
use crate::ingest::{write_quotes, write_trades};
use crate::types::{DailyQuote, Side, TradeRecord};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SynthError {
    #[error("infeasible config: {0}")]
    InfeasibleConfig(String),
    #[error("unknown clique index {0}")]
    UnknownClique(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_companies: usize,
    /// Inclusive range of background insiders per company.
    pub insiders_per_company: (usize, usize),
    /// Inclusive range of trades per background insider.
    pub trades_per_insider: (usize, usize),
    /// Inclusive calendar range; trading happens on weekdays only.
    pub date_span: (NaiveDate, NaiveDate),
    pub n_planted_cliques: usize,
    /// Inclusive range of members per planted clique.
    pub clique_size: (usize, usize),
    /// Length of each planted shared date window.
    pub shared_subsequence_length: usize,
    pub n_planted_hubs: usize,
    pub cliques_per_hub: usize,
    /// Probability that a planted-group trade is priced favorably relative
    /// to the close.
    pub profit_bias: f64,
    /// Side on which planted structures trade. Background insiders pick a
    /// side at random.
    pub planted_side: Side,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 42,
            n_companies: 10,
            insiders_per_company: (5, 15),
            trades_per_insider: (6, 12),
            date_span: (
                NaiveDate::from_ymd_opt(2014, 1, 1).unwrap(),
                NaiveDate::from_ymd_opt(2014, 12, 31).unwrap(),
            ),
            n_planted_cliques: 0,
            clique_size: (3, 6),
            shared_subsequence_length: 5,
            n_planted_hubs: 0,
            cliques_per_hub: 3,
            profit_bias: 0.5,
            planted_side: Side::Sale,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedClique {
    pub company: String,
    pub members: Vec<String>,
    pub dates: Vec<NaiveDate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedHub {
    pub insider_id: String,
    /// Indices into the clique list.
    pub cliques: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub cliques: Vec<PlantedClique>,
    pub hubs: Vec<PlantedHub>,
}

#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub trades_csv: String,
    pub quotes_csv: String,
    pub ground_truth: GroundTruth,
}

pub fn ground_truth_to_json(gt: &GroundTruth) -> String {
    let value = serde_json::to_value(gt).expect("ground truth serializes");
    serde_json::to_string_pretty(&value).expect("json value prints")
}

pub fn ground_truth_from_json(s: &str) -> Result<GroundTruth, serde_json::Error> {
    serde_json::from_str(s)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

// Stream tags keep per-unit generators disjoint.
const TAG_BACKGROUND: u64 = 0x01;
const TAG_QUOTES: u64 = 0x02;
const TAG_CLIQUE: u64 = 0x03;
const TAG_HUB: u64 = 0x04;

fn stream(seed: u64, tag: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(tag) ^ splitmix64(index << 8)))
}

fn weekdays(span: (NaiveDate, NaiveDate)) -> Vec<NaiveDate> {
    let mut days = Vec::new();
    let mut d = span.0;
    while d <= span.1 {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            days.push(d);
        }
        d = d.succ_opt().expect("date within range");
    }
    days
}

/// Mutable dataset builder. `generate` drives it from a [`SynthConfig`];
/// tests can also compose scenarios directly via `plant_clique_explicit`
/// and `plant_hub`.
pub struct SynthDataset {
    seed: u64,
    companies: Vec<String>,
    calendar: Vec<NaiveDate>,
    /// Per-company constant close in cents.
    close_cents: Vec<i64>,
    profit_bias: f64,
    background: Vec<TradeRecord>,
    clique_trades: Vec<TradeRecord>,
    hub_trades: Vec<TradeRecord>,
    ground_truth: GroundTruth,
}

impl SynthDataset {
    pub fn new(
        seed: u64,
        n_companies: usize,
        date_span: (NaiveDate, NaiveDate),
        profit_bias: f64,
    ) -> Result<Self, SynthError> {
        if n_companies == 0 {
            return Err(SynthError::InfeasibleConfig("need at least one company".into()));
        }
        if date_span.0 > date_span.1 {
            return Err(SynthError::InfeasibleConfig("empty date span".into()));
        }
        if !(0.0..=1.0).contains(&profit_bias) {
            return Err(SynthError::InfeasibleConfig(format!(
                "profit_bias {profit_bias} outside [0, 1]"
            )));
        }
        let calendar = weekdays(date_span);
        if calendar.is_empty() {
            return Err(SynthError::InfeasibleConfig(
                "date span contains no weekdays".into(),
            ));
        }
        let companies: Vec<String> = (0..n_companies).map(|i| format!("C{i:03}")).collect();
        let close_cents: Vec<i64> = (0..n_companies)
            .map(|i| {
                let mut rng = stream(seed, TAG_QUOTES, i as u64);
                rng.random_range(500..5000)
            })
            .collect();
        Ok(SynthDataset {
            seed,
            companies,
            calendar,
            close_cents,
            profit_bias,
            background: Vec::new(),
            clique_trades: Vec::new(),
            hub_trades: Vec::new(),
            ground_truth: GroundTruth::default(),
        })
    }

    pub fn calendar_len(&self) -> usize {
        self.calendar.len()
    }

    /// Draws a favorable or adverse price (in cents, never equal to the
    /// close) according to the dataset's profit bias.
    fn biased_price(&self, rng: &mut ChaCha8Rng, side: Side, close_cents: i64) -> f64 {
        let favorable = rng.random_range(0.0..1.0) < self.profit_bias;
        let max_delta = (close_cents / 20).max(1);
        let delta = rng.random_range(1..=max_delta);
        let cents = match (side, favorable) {
            (Side::Purchase, true) | (Side::Sale, false) => close_cents - delta,
            (Side::Purchase, false) | (Side::Sale, true) => close_cents + delta,
        };
        cents.max(1) as f64 / 100.0
    }

    /// Generates background insiders for every company: each draws a side
    /// and a number of dates (with replacement, so same-day repeat trades
    /// occur) from the company calendar.
    pub fn add_background(
        &mut self,
        insiders_per_company: (usize, usize),
        trades_per_insider: (usize, usize),
        exec: Exec,
    ) -> Result<(), SynthError> {
        if insiders_per_company.0 > insiders_per_company.1
            || trades_per_insider.0 > trades_per_insider.1
        {
            return Err(SynthError::InfeasibleConfig("empty range".into()));
        }
        let seed = self.seed;
        let calendar = &self.calendar;
        let close_cents = &self.close_cents;
        let bias_price =
            |this: &Self, rng: &mut ChaCha8Rng, close: i64| -> f64 {
                let _ = this;
                // Background prices scatter around the close on both sides.
                let max_delta = (close / 20).max(1);
                let delta = rng.random_range(-max_delta..=max_delta);
                ((close + delta).max(1)) as f64 / 100.0
            };
        let jobs: Vec<(usize, String)> = self
            .companies
            .iter()
            .enumerate()
            .map(|(i, c)| (i, c.clone()))
            .collect();
        let per_company: Vec<Vec<TradeRecord>> = map_ordered(exec, jobs, |(c_idx, company)| {
            let mut rng = stream(seed, TAG_BACKGROUND, c_idx as u64);
            let n_insiders = rng.random_range(insiders_per_company.0..=insiders_per_company.1);
            let mut trades = Vec::new();
            for i in 0..n_insiders {
                let insider_id = format!("B{c_idx:03}-{i:04}");
                let side = if rng.random_range(0..2) == 0 {
                    Side::Purchase
                } else {
                    Side::Sale
                };
                let n_trades = rng.random_range(trades_per_insider.0..=trades_per_insider.1);
                for _ in 0..n_trades {
                    let date = calendar[rng.random_range(0..calendar.len())];
                    let shares = rng.random_range(10..5000);
                    let price = if rng.random_range(0.0..1.0) < 0.8 {
                        Some(bias_price(self, &mut rng, close_cents[c_idx]))
                    } else {
                        None
                    };
                    trades.push(TradeRecord {
                        insider_id: insider_id.clone(),
                        insider_name: format!("Insider {insider_id}"),
                        company: company.clone(),
                        date,
                        side,
                        shares,
                        price,
                    });
                }
            }
            trades
        });
        self.background.extend(per_company.into_iter().flatten());
        Ok(())
    }

    /// Plants one clique with generated members over a random consecutive
    /// weekday window. Returns the clique index.
    pub fn plant_clique(
        &mut self,
        company_idx: usize,
        size: usize,
        window_len: usize,
        side: Side,
    ) -> Result<usize, SynthError> {
        if company_idx >= self.companies.len() {
            return Err(SynthError::InfeasibleConfig(format!(
                "company index {company_idx} out of range"
            )));
        }
        if window_len > self.calendar.len() {
            return Err(SynthError::InfeasibleConfig(format!(
                "shared window of {window_len} days exceeds the {}-day calendar",
                self.calendar.len()
            )));
        }
        if size < 2 {
            return Err(SynthError::InfeasibleConfig("clique size below 2".into()));
        }
        let clique_idx = self.ground_truth.cliques.len();
        let mut rng = stream(self.seed, TAG_CLIQUE, clique_idx as u64);
        let start = rng.random_range(0..=self.calendar.len() - window_len);
        let dates: Vec<NaiveDate> = self.calendar[start..start + window_len].to_vec();
        let members: Vec<String> = (0..size).map(|j| format!("K{clique_idx:03}-{j:02}")).collect();
        self.plant_clique_members(company_idx, members, dates, side, &mut rng)
    }

    /// Plants a clique with explicit members and dates (for composing exact
    /// scenarios). Members may appear in several cliques.
    pub fn plant_clique_explicit(
        &mut self,
        company_idx: usize,
        members: Vec<String>,
        dates: Vec<NaiveDate>,
        side: Side,
    ) -> Result<usize, SynthError> {
        let clique_idx = self.ground_truth.cliques.len();
        let mut rng = stream(self.seed, TAG_CLIQUE, clique_idx as u64);
        self.plant_clique_members(company_idx, members, dates, side, &mut rng)
    }

    fn plant_clique_members(
        &mut self,
        company_idx: usize,
        members: Vec<String>,
        dates: Vec<NaiveDate>,
        side: Side,
        rng: &mut ChaCha8Rng,
    ) -> Result<usize, SynthError> {
        let company = self.companies[company_idx].clone();
        let close = self.close_cents[company_idx];
        for member in &members {
            for &date in &dates {
                let price = self.biased_price(rng, side, close);
                self.clique_trades.push(TradeRecord {
                    insider_id: member.clone(),
                    insider_name: format!("Insider {member}"),
                    company: company.clone(),
                    date,
                    side,
                    shares: rng.random_range(100..2000),
                    price: Some(price),
                });
            }
        }
        self.ground_truth.cliques.push(PlantedClique {
            company,
            members,
            dates,
        });
        Ok(self.ground_truth.cliques.len() - 1)
    }

    /// Gives `hub_id` every listed clique's full shared window in that
    /// clique's company, so the hub joins each clique's co-trading group.
    /// The listed cliques must live in pairwise distinct companies.
    pub fn plant_hub(&mut self, hub_id: &str, cliques: &[usize]) -> Result<(), SynthError> {
        for &c in cliques {
            if c >= self.ground_truth.cliques.len() {
                return Err(SynthError::UnknownClique(c));
            }
        }
        let mut companies: Vec<&str> = cliques
            .iter()
            .map(|&c| self.ground_truth.cliques[c].company.as_str())
            .collect();
        companies.sort_unstable();
        companies.dedup();
        if companies.len() != cliques.len() {
            return Err(SynthError::InfeasibleConfig(
                "hub cliques must be in pairwise distinct companies".into(),
            ));
        }
        if cliques
            .iter()
            .all(|&c| self.ground_truth.cliques[c].members.iter().any(|m| m == hub_id))
        {
            return Err(SynthError::InfeasibleConfig(format!(
                "{hub_id} is already a member of every listed clique"
            )));
        }

        let hub_idx = self.ground_truth.hubs.len();
        let mut rng = stream(self.seed, TAG_HUB, hub_idx as u64);
        for &c in cliques {
            let clique = self.ground_truth.cliques[c].clone();
            let company_idx = self
                .companies
                .iter()
                .position(|x| *x == clique.company)
                .expect("clique company exists");
            let side = side_of_clique(&self.clique_trades, &clique);
            for &date in &clique.dates {
                let price = self.biased_price(&mut rng, side, self.close_cents[company_idx]);
                self.hub_trades.push(TradeRecord {
                    insider_id: hub_id.to_string(),
                    insider_name: format!("Insider {hub_id}"),
                    company: clique.company.clone(),
                    date,
                    side,
                    shares: rng.random_range(100..2000),
                    price: Some(price),
                });
            }
        }
        self.ground_truth.hubs.push(PlantedHub {
            insider_id: hub_id.to_string(),
            cliques: cliques.to_vec(),
        });
        Ok(())
    }

    /// Serializes trades, quotes covering every (company, calendar day),
    /// and the ground truth.
    pub fn emit(&self) -> SynthOutput {
        let mut trades: Vec<TradeRecord> = Vec::with_capacity(
            self.background.len() + self.clique_trades.len() + self.hub_trades.len(),
        );
        trades.extend(self.background.iter().cloned());
        trades.extend(self.clique_trades.iter().cloned());
        trades.extend(self.hub_trades.iter().cloned());

        let mut quotes = Vec::with_capacity(self.companies.len() * self.calendar.len());
        for (c_idx, company) in self.companies.iter().enumerate() {
            let mut rng = stream(self.seed, TAG_QUOTES, c_idx as u64);
            let close_cents: i64 = rng.random_range(500..5000);
            debug_assert_eq!(close_cents, self.close_cents[c_idx]);
            for &date in &self.calendar {
                quotes.push(DailyQuote {
                    company: company.clone(),
                    date,
                    close: close_cents as f64 / 100.0,
                    volume: rng.random_range(100_000..2_000_000),
                });
            }
        }

        let mut trades_csv = Vec::new();
        write_trades(&mut trades_csv, &trades).expect("in-memory write");
        let mut quotes_csv = Vec::new();
        write_quotes(&mut quotes_csv, &quotes).expect("in-memory write");
        SynthOutput {
            trades_csv: String::from_utf8(trades_csv).expect("csv is utf-8"),
            quotes_csv: String::from_utf8(quotes_csv).expect("csv is utf-8"),
            ground_truth: self.ground_truth.clone(),
        }
    }
}

fn side_of_clique(clique_trades: &[TradeRecord], clique: &PlantedClique) -> Side {
    clique_trades
        .iter()
        .find(|t| t.company == clique.company && clique.members.contains(&t.insider_id))
        .map_or(Side::Sale, |t| t.side)
}

/// Generates a full dataset from a config: background per company, then
/// cliques assigned round-robin to companies, then hubs over consecutive
/// clique blocks.
pub fn generate(config: &SynthConfig, exec: Exec) -> Result<SynthOutput, SynthError> {
    if config.n_planted_cliques > 0 || config.n_planted_hubs > 0 {
        let calendar_len = weekdays(config.date_span).len();
        if config.shared_subsequence_length > calendar_len {
            return Err(SynthError::InfeasibleConfig(format!(
                "shared_subsequence_length {} exceeds the {}-weekday span",
                config.shared_subsequence_length, calendar_len
            )));
        }
    }
    if config.n_planted_hubs > 0 {
        if config.cliques_per_hub > config.n_companies {
            return Err(SynthError::InfeasibleConfig(
                "cliques_per_hub exceeds company count; bridged cliques need distinct companies"
                    .into(),
            ));
        }
        if config.n_planted_hubs * config.cliques_per_hub > config.n_planted_cliques {
            return Err(SynthError::InfeasibleConfig(format!(
                "{} hubs x {} cliques each need more cliques than the {} planted",
                config.n_planted_hubs, config.cliques_per_hub, config.n_planted_cliques
            )));
        }
    }
    if config.clique_size.0 > config.clique_size.1 {
        return Err(SynthError::InfeasibleConfig("empty clique size range".into()));
    }

    let mut dataset = SynthDataset::new(
        config.seed,
        config.n_companies,
        config.date_span,
        config.profit_bias,
    )?;
    dataset.add_background(config.insiders_per_company, config.trades_per_insider, exec)?;

    for k in 0..config.n_planted_cliques {
        let mut rng = stream(config.seed, TAG_CLIQUE, 0x1000_0000 + k as u64);
        let size = rng.random_range(config.clique_size.0..=config.clique_size.1);
        dataset.plant_clique(
            k % config.n_companies,
            size,
            config.shared_subsequence_length,
            config.planted_side,
        )?;
    }
    for h in 0..config.n_planted_hubs {
        let cliques: Vec<usize> =
            (h * config.cliques_per_hub..(h + 1) * config.cliques_per_hub).collect();
        dataset.plant_hub(&format!("H{h:02}"), &cliques)?;
    }
    Ok(dataset.emit())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Exec;
    use crate::hypergraph::{mine_hyperedges, multi_edge_insiders};
    use crate::ingest::{build_date_sequences, parse_quotes, parse_trades, IngestConfig};
    use crate::network::{build_network, egonet};
    use crate::profit::{majority_profit_fraction, profit_series, QuoteTable};
    use crate::similarity::SimilarityConfig;
    use std::collections::BTreeSet;

    fn day(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    fn t5_config() -> SimilarityConfig {
        SimilarityConfig {
            lcs_threshold_sale: 5,
            ..SimilarityConfig::default()
        }
    }

    #[test]
    fn same_seed_is_byte_identical() {
        let config = SynthConfig {
            n_planted_cliques: 4,
            n_planted_hubs: 1,
            cliques_per_hub: 3,
            ..SynthConfig::default()
        };
        let a = generate(&config, Exec::Sequential).unwrap();
        let b = generate(&config, Exec::Parallel).unwrap();
        assert_eq!(a.trades_csv, b.trades_csv);
        assert_eq!(a.quotes_csv, b.quotes_csv);
        assert_eq!(a.ground_truth, b.ground_truth);

        let c = generate(&SynthConfig { seed: 43, ..config }, Exec::Sequential).unwrap();
        assert_ne!(a.trades_csv, c.trades_csv);
    }

    #[test]
    fn three_insiders_sharing_one_window_mine_to_one_hyperedge() {
        let config = SynthConfig {
            n_companies: 1,
            insiders_per_company: (0, 0),
            n_planted_cliques: 1,
            clique_size: (3, 3),
            shared_subsequence_length: 5,
            ..SynthConfig::default()
        };
        let out = generate(&config, Exec::Sequential).unwrap();
        let (trades, errors) =
            parse_trades(out.trades_csv.as_bytes(), IngestConfig::default()).unwrap();
        assert!(errors.is_empty());
        let sequences = build_date_sequences(&trades, 5);
        let h = mine_hyperedges(&sequences, Side::Sale, &t5_config(), Exec::Sequential);
        assert_eq!(h.hyperedges.len(), 1);
        assert_eq!(h.hyperedges[0].members.len(), 3);
        assert_eq!(h.hyperedges[0].members, out.ground_truth.cliques[0].members);
        assert_eq!(h.hyperedges[0].witness, out.ground_truth.cliques[0].dates);
    }

    #[test]
    fn pairwise_windows_mine_to_three_pair_hyperedges() {
        let mut dataset = SynthDataset::new(
            7,
            1,
            (day("2014-01-01"), day("2014-12-31")),
            0.5,
        )
        .unwrap();
        let w = |lo: u32, hi: u32| -> Vec<NaiveDate> {
            (lo..=hi)
                .map(|n| day(&format!("2014-06-{n:02}")))
                .filter(|d| !matches!(d.weekday(), Weekday::Sat | Weekday::Sun))
                .collect()
        };
        // June 2..6, 9..13, 16..20 are weekday runs of length 5.
        dataset
            .plant_clique_explicit(0, vec!["t1".into(), "t2".into()], w(2, 6), Side::Sale)
            .unwrap();
        dataset
            .plant_clique_explicit(0, vec!["t1".into(), "t3".into()], w(9, 13), Side::Sale)
            .unwrap();
        dataset
            .plant_clique_explicit(0, vec!["t2".into(), "t3".into()], w(16, 20), Side::Sale)
            .unwrap();
        let out = dataset.emit();
        let (trades, _) =
            parse_trades(out.trades_csv.as_bytes(), IngestConfig::default()).unwrap();
        let sequences = build_date_sequences(&trades, 5);
        let h = mine_hyperedges(&sequences, Side::Sale, &t5_config(), Exec::Sequential);
        let members: Vec<Vec<String>> = h.hyperedges.iter().map(|e| e.members.clone()).collect();
        assert_eq!(
            members,
            vec![
                vec!["t1".to_string(), "t2".to_string()],
                vec!["t1".to_string(), "t3".to_string()],
                vec!["t2".to_string(), "t3".to_string()],
            ]
        );
        // Pairwise network over the same data is the 3-clique.
        let net = build_network(&sequences, Side::Sale, &t5_config(), Exec::Sequential);
        assert_eq!(net.nodes, vec!["t1", "t2", "t3"]);
        assert_eq!(net.edges.len(), 3);
    }

    #[test]
    fn hub_bridging_two_cliques_of_four() {
        let config = SynthConfig {
            n_companies: 2,
            insiders_per_company: (0, 0),
            n_planted_cliques: 2,
            clique_size: (4, 4),
            shared_subsequence_length: 5,
            n_planted_hubs: 1,
            cliques_per_hub: 2,
            ..SynthConfig::default()
        };
        let out = generate(&config, Exec::Sequential).unwrap();
        let (trades, _) =
            parse_trades(out.trades_csv.as_bytes(), IngestConfig::default()).unwrap();
        let sequences = build_date_sequences(&trades, 5);
        let net = build_network(&sequences, Side::Sale, &t5_config(), Exec::Sequential);
        let hub = &out.ground_truth.hubs[0].insider_id;
        let ego = egonet(&net, hub).unwrap();
        // Hub joins both 4-cliques fully: 9 nodes; each company subgraph is
        // a 5-clique sharing only the hub, 2 * C(5,2) = 20 induced edges.
        assert_eq!((ego.v_count, ego.e_count), (9, 20));
    }

    #[test]
    fn hub_in_three_cliques_tops_multi_edge_ranking() {
        let config = SynthConfig {
            n_companies: 3,
            insiders_per_company: (0, 0),
            n_planted_cliques: 3,
            clique_size: (4, 5),
            n_planted_hubs: 1,
            cliques_per_hub: 3,
            ..SynthConfig::default()
        };
        let out = generate(&config, Exec::Sequential).unwrap();
        let (trades, _) =
            parse_trades(out.trades_csv.as_bytes(), IngestConfig::default()).unwrap();
        let sequences = build_date_sequences(&trades, 5);
        let h = mine_hyperedges(&sequences, Side::Sale, &t5_config(), Exec::Sequential);
        let multi = multi_edge_insiders(&h, 3);
        assert_eq!(multi[0].0, out.ground_truth.hubs[0].insider_id);
        assert_eq!(multi[0].1.len(), 3);
    }

    #[test]
    fn unknown_clique_is_an_error() {
        let mut dataset =
            SynthDataset::new(1, 1, (day("2014-01-01"), day("2014-03-31")), 0.5).unwrap();
        assert_eq!(
            dataset.plant_hub("H0", &[0]),
            Err(SynthError::UnknownClique(0))
        );
    }

    #[test]
    fn infeasible_configs_are_rejected() {
        // Span shorter than the shared window.
        let config = SynthConfig {
            date_span: (day("2014-01-06"), day("2014-01-08")),
            shared_subsequence_length: 5,
            n_planted_cliques: 1,
            ..SynthConfig::default()
        };
        assert!(matches!(
            generate(&config, Exec::Sequential),
            Err(SynthError::InfeasibleConfig(_))
        ));
        // More bridged cliques per hub than companies.
        let config = SynthConfig {
            n_companies: 2,
            n_planted_cliques: 3,
            n_planted_hubs: 1,
            cliques_per_hub: 3,
            ..SynthConfig::default()
        };
        assert!(matches!(
            generate(&config, Exec::Sequential),
            Err(SynthError::InfeasibleConfig(_))
        ));
        // Bad bias.
        assert!(SynthDataset::new(1, 1, (day("2014-01-01"), day("2014-02-01")), 1.5).is_err());
    }

    fn planted_profit_fraction(bias: f64, n_cliques: usize) -> (f64, usize) {
        let config = SynthConfig {
            n_companies: n_cliques,
            insiders_per_company: (0, 0),
            n_planted_cliques: n_cliques,
            clique_size: (5, 5),
            shared_subsequence_length: 5,
            profit_bias: bias,
            ..SynthConfig::default()
        };
        let out = generate(&config, Exec::Sequential).unwrap();
        let (trades, _) =
            parse_trades(out.trades_csv.as_bytes(), IngestConfig::default()).unwrap();
        let (quotes, _) = parse_quotes(out.quotes_csv.as_bytes()).unwrap();
        let table = QuoteTable::new(&quotes);
        let mut all_points = Vec::new();
        for clique in &out.ground_truth.cliques {
            let dates: BTreeSet<NaiveDate> = clique.dates.iter().copied().collect();
            for member in &clique.members {
                let (points, skipped) = profit_series(
                    member,
                    &clique.company,
                    Side::Sale,
                    &dates,
                    &trades,
                    &table,
                );
                assert_eq!(skipped.total(), 0, "planted trades are fully priced");
                all_points.extend(points);
            }
        }
        let n = all_points.len();
        (majority_profit_fraction(&all_points).unwrap(), n)
    }

    #[test]
    fn profit_bias_half_converges_to_half() {
        let (fraction, n) = planted_profit_fraction(0.5, 10);
        assert!(n >= 200, "need >= 200 trades, got {n}");
        assert!((0.4..=0.6).contains(&fraction), "fraction {fraction}");
    }

    #[test]
    fn profit_bias_high_exceeds_eighty_percent() {
        let (fraction, n) = planted_profit_fraction(0.9, 10);
        assert!(n >= 200);
        assert!(fraction > 0.8, "fraction {fraction}");
    }

    #[test]
    fn planted_structures_are_recovered_end_to_end() {
        let config = SynthConfig {
            n_companies: 8,
            insiders_per_company: (3, 8),
            n_planted_cliques: 6,
            clique_size: (3, 5),
            shared_subsequence_length: 6,
            n_planted_hubs: 2,
            cliques_per_hub: 3,
            ..SynthConfig::default()
        };
        let out = generate(&config, Exec::Sequential).unwrap();
        let (trades, _) =
            parse_trades(out.trades_csv.as_bytes(), IngestConfig::default()).unwrap();
        let sequences = build_date_sequences(&trades, 5);
        let h = mine_hyperedges(&sequences, Side::Sale, &t5_config(), Exec::Sequential);
        // Every planted clique appears inside some hyperedge of its company.
        for clique in &out.ground_truth.cliques {
            let found = h.hyperedges.iter().any(|e| {
                e.company == clique.company
                    && clique.members.iter().all(|m| e.members.contains(m))
            });
            assert!(found, "clique {:?} not recovered", clique.members);
        }
        // Every hub is incident to at least cliques_per_hub hyperedges.
        let multi = multi_edge_insiders(&h, config.cliques_per_hub);
        for hub in &out.ground_truth.hubs {
            assert!(
                multi.iter().any(|(id, _)| id == &hub.insider_id),
                "hub {} not recovered",
                hub.insider_id
            );
        }
    }

    #[test]
    fn ground_truth_json_round_trips() {
        let config = SynthConfig {
            n_planted_cliques: 2,
            ..SynthConfig::default()
        };
        let out = generate(&config, Exec::Sequential).unwrap();
        let json = ground_truth_to_json(&out.ground_truth);
        assert_eq!(ground_truth_from_json(&json).unwrap(), out.ground_truth);
    }
}
