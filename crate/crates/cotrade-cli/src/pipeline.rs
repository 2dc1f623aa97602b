//! End-to-end orchestration: files in, per-side artifact directories out.
//!
//! Artifacts per side: `network.json`, `network.dot`, `stats.json`,
//! `component_sizes.csv`, `hyperedges.json`, `hypergraph.dot`,
//! `hyperedge_sizes.csv`, `fit.json`, `scores.csv`, `scores_top.csv`,
//! `profits_top_outliers.csv`, `profits_multi_hyperedge.csv`, and
//! `profit_summary.json`. Output bytes are identical across runs and
//! parallelism levels.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;

use cotrade::anomaly::{fit_to_json, scores_to_csv, total_outlier_scores, AnomalyError, OutlierRecord};
use cotrade::exec::Exec;
use cotrade::hypergraph::{
    hyperedge_size_distribution, hypergraph_to_dot, hypergraph_to_json, mine_hyperedges,
    multi_edge_insiders, size_distribution_csv, Hypergraph,
};
use cotrade::ingest::{build_date_sequences, parse_quotes, parse_trades, IngestConfig, IngestError};
use cotrade::network::{
    all_egonet_stats, build_network, component_histogram_csv, egonet_to_dot, network_stats,
    network_to_dot, network_to_json, stats_to_json, Egonet, InsiderNetwork,
};
use cotrade::profit::{
    profit_series, profits_to_csv, summary_to_json, ProfitPoint, ProfitSummaryEntry, QuoteTable,
    SkippedCounts,
};
use cotrade::similarity::{lcs_witness, LcsVariant, SimilarityMode};
use cotrade::synth::{generate, ground_truth_to_json, SynthConfig};
use cotrade::types::{DateSequence, Side, TradeRecord};

use crate::config::PipelineConfig;
use crate::error::PipelineError;

/// Which artifact groups a run writes. Later stages imply the computation
/// (not the files) of earlier ones.
#[derive(Debug, Clone, Copy, Default)]
pub struct Stages {
    pub network: bool,
    pub hyper: bool,
    pub score: bool,
    pub profit: bool,
}

impl Stages {
    pub fn all(profit: bool) -> Self {
        Stages {
            network: true,
            hyper: true,
            score: true,
            profit,
        }
    }

    fn needs_score(&self) -> bool {
        self.score || self.profit
    }
}

/// Deterministic run summary, one line per stage per side.
#[derive(Debug, Default)]
pub struct Report {
    pub lines: Vec<String>,
}

impl Report {
    fn push(&mut self, line: String) {
        self.lines.push(line);
    }

    pub fn render(&self) -> String {
        self.lines.join("\n")
    }
}

fn map_ingest_error(e: IngestError, path: &Path) -> PipelineError {
    PipelineError::Input(format!("{}: {e}", path.display()))
}

fn open(path: &Path) -> Result<BufReader<fs::File>, PipelineError> {
    fs::File::open(path)
        .map(BufReader::new)
        .map_err(|e| PipelineError::Input(format!("cannot open {}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), PipelineError> {
    fs::write(path, contents)
        .map_err(|e| PipelineError::Input(format!("cannot write {}: {e}", path.display())))
}

pub fn load_trades(config: &PipelineConfig) -> Result<(Vec<TradeRecord>, usize), PipelineError> {
    let reader = open(&config.trades)?;
    let (trades, errors) = parse_trades(reader, IngestConfig { strict: config.strict })
        .map_err(|e| map_ingest_error(e, &config.trades))?;
    Ok((trades, errors.len()))
}

fn load_quote_table(config: &PipelineConfig) -> Result<(QuoteTable, usize, usize), PipelineError> {
    let path = config.quotes.as_ref().ok_or_else(|| {
        PipelineError::Input("profit stage enabled but no quotes file given (--quotes)".into())
    })?;
    let reader = open(path)?;
    let (quotes, errors) = parse_quotes(reader).map_err(|e| map_ingest_error(e, path))?;
    Ok((QuoteTable::new(&quotes), quotes.len(), errors.len()))
}

/// Graph structures exportable as DOT.
pub enum DotSource<'a> {
    Network(&'a InsiderNetwork),
    Egonet(&'a Egonet),
    Hypergraph(&'a Hypergraph),
}

/// Writes a DOT rendering; refuses empty structures.
pub fn export_dot(source: DotSource<'_>, path: &Path) -> Result<(), PipelineError> {
    let dot = match source {
        DotSource::Network(net) => {
            if net.nodes.is_empty() {
                return Err(PipelineError::Degenerate("empty network: nothing to export".into()));
            }
            network_to_dot(net)
        }
        DotSource::Egonet(ego) => {
            if ego.nodes.is_empty() {
                return Err(PipelineError::Degenerate("empty egonet: nothing to export".into()));
            }
            egonet_to_dot(ego)
        }
        DotSource::Hypergraph(h) => {
            if h.hyperedges.is_empty() {
                return Err(PipelineError::Degenerate(
                    "empty hypergraph: nothing to export".into(),
                ));
            }
            hypergraph_to_dot(h)
        }
    };
    write(path, &dot)
}

/// Runs the selected stages for every configured side.
pub fn run_pipeline(config: &PipelineConfig, stages: Stages) -> Result<Report, PipelineError> {
    config.validate()?;
    let mut report = Report::default();

    let (trades, trade_row_errors) = load_trades(config)?;
    report.push(format!(
        "trades: {} parsed, {} malformed rows",
        trades.len(),
        trade_row_errors
    ));

    let quotes = if stages.profit {
        let (table, n, row_errors) = load_quote_table(config)?;
        report.push(format!("quotes: {n} parsed, {row_errors} malformed rows"));
        Some(table)
    } else {
        None
    };

    let sequences = build_date_sequences(&trades, config.min_trades);
    report.push(format!(
        "sequences: {} groups with >= {} trades",
        sequences.len(),
        config.min_trades
    ));

    for &side in &config.sides {
        run_side(config, stages, side, &trades, &sequences, quotes.as_ref(), &mut report)?;
    }
    Ok(report)
}

fn side_dir(config: &PipelineConfig, side: Side) -> PathBuf {
    config.out_dir.join(side.as_str())
}

fn run_side(
    config: &PipelineConfig,
    stages: Stages,
    side: Side,
    trades: &[TradeRecord],
    sequences: &[DateSequence],
    quotes: Option<&QuoteTable>,
    report: &mut Report,
) -> Result<(), PipelineError> {
    let dir = side_dir(config, side);
    fs::create_dir_all(&dir)
        .map_err(|e| PipelineError::Input(format!("cannot create {}: {e}", dir.display())))?;

    let net = build_network(sequences, side, &config.similarity, Exec::Parallel);
    if stages.network {
        write(&dir.join("network.json"), &network_to_json(&net))?;
        let stats = network_stats(&net);
        write(&dir.join("stats.json"), &stats_to_json(&stats))?;
        write(&dir.join("component_sizes.csv"), &component_histogram_csv(&stats))?;
        if !net.nodes.is_empty() {
            export_dot(DotSource::Network(&net), &dir.join("network.dot"))?;
        }
        report.push(format!(
            "{side}: network {} nodes, {} edges, {} components",
            stats.node_count, stats.edge_count, stats.component_count
        ));
    }

    let hypergraph = if stages.hyper || stages.profit {
        Some(mine_hyperedges(sequences, side, &config.similarity, Exec::Parallel))
    } else {
        None
    };
    if stages.hyper {
        let h = hypergraph.as_ref().expect("mined above");
        write(&dir.join("hyperedges.json"), &hypergraph_to_json(h))?;
        let bins = hyperedge_size_distribution(h);
        write(&dir.join("hyperedge_sizes.csv"), &size_distribution_csv(&bins))?;
        if !h.hyperedges.is_empty() {
            export_dot(DotSource::Hypergraph(h), &dir.join("hypergraph.dot"))?;
        }
        report.push(format!(
            "{side}: {} hyperedges over {} insiders",
            h.hyperedges.len(),
            h.vertices.len()
        ));
    }

    if !stages.needs_score() {
        return Ok(());
    }

    let ego_stats = all_egonet_stats(&net, Exec::Parallel);
    if ego_stats.len() < 2 {
        return Err(PipelineError::Degenerate(format!(
            "{side}: only {} egonets; need at least 2 to fit and score",
            ego_stats.len()
        )));
    }
    let (fit, records) =
        total_outlier_scores(&ego_stats, &config.anomaly, Exec::Parallel).map_err(|e| match e {
            AnomalyError::DegenerateInput(msg) => PipelineError::Degenerate(format!("{side}: {msg}")),
        })?;
    if stages.score {
        write(&dir.join("fit.json"), &fit_to_json(&fit))?;
        write(&dir.join("scores.csv"), &scores_to_csv(&records))?;
        let top: Vec<OutlierRecord> =
            records.iter().take(config.top_n).cloned().collect();
        write(&dir.join("scores_top.csv"), &scores_to_csv(&top))?;
        report.push(format!(
            "{side}: scored {} egonets, exponent {:.6}, top {} (total {:.6})",
            records.len(),
            fit.exponent,
            records[0].insider_id,
            records[0].total
        ));
    }

    if stages.profit {
        let quotes = quotes.expect("loaded when profit stage is on");
        let h = hypergraph.as_ref().expect("mined above");
        let (top_points, top_summary) = top_outlier_profits(
            config,
            side,
            &net,
            sequences,
            &records,
            trades,
            quotes,
        );
        let (multi_points, multi_summary) =
            multi_hyperedge_profits(config, side, h, trades, quotes);
        write(&dir.join("profits_top_outliers.csv"), &profits_to_csv(&top_points))?;
        write(
            &dir.join("profits_multi_hyperedge.csv"),
            &profits_to_csv(&multi_points),
        )?;
        let summary = serde_json::json!({
            "multi_hyperedge": serde_json::from_str::<serde_json::Value>(
                &summary_to_json(&multi_summary)).expect("valid json"),
            "top_outliers": serde_json::from_str::<serde_json::Value>(
                &summary_to_json(&top_summary)).expect("valid json"),
        });
        write(
            &dir.join("profit_summary.json"),
            &serde_json::to_string_pretty(&summary).expect("json prints"),
        )?;
        report.push(format!(
            "{side}: profit points {} (top outliers), {} (multi-hyperedge)",
            top_points.len(),
            multi_points.len()
        ));
    }
    Ok(())
}

/// Shared dates of an ego with its neighbors, per company: the union of
/// LCS witnesses over the ego's incident edges.
fn egonet_shared_dates(
    net: &InsiderNetwork,
    sequences: &BTreeMap<(&str, &str), &DateSequence>,
    insider: &str,
    witness_variant: LcsVariant,
) -> BTreeMap<String, BTreeSet<NaiveDate>> {
    let mut by_company: BTreeMap<String, BTreeSet<NaiveDate>> = BTreeMap::new();
    for edge in net.incident_edges(insider) {
        let other = if edge.a == insider { &edge.b } else { &edge.a };
        let (Some(mine), Some(theirs)) = (
            sequences.get(&(insider, edge.company.as_str())),
            sequences.get(&(other.as_str(), edge.company.as_str())),
        ) else {
            continue;
        };
        let witness =
            lcs_witness(mine, theirs, witness_variant).expect("edge endpoints share company");
        by_company
            .entry(edge.company.clone())
            .or_default()
            .extend(witness);
    }
    by_company
}

fn summarize(
    insider: &str,
    points: &[ProfitPoint],
    skipped: SkippedCounts,
) -> ProfitSummaryEntry {
    let mine: Vec<&ProfitPoint> = points.iter().filter(|p| p.insider_id == insider).collect();
    let positive = mine.iter().filter(|p| p.amount > 0.0).count();
    ProfitSummaryEntry {
        insider_id: insider.to_string(),
        points: mine.len(),
        positive_fraction: (!mine.is_empty()).then(|| positive as f64 / mine.len() as f64),
        skipped_missing_price: skipped.missing_price,
        skipped_missing_quote: skipped.missing_quote,
    }
}

fn top_outlier_profits(
    config: &PipelineConfig,
    side: Side,
    net: &InsiderNetwork,
    sequences: &[DateSequence],
    records: &[OutlierRecord],
    trades: &[TradeRecord],
    quotes: &QuoteTable,
) -> (Vec<ProfitPoint>, Vec<ProfitSummaryEntry>) {
    let seq_index: BTreeMap<(&str, &str), &DateSequence> = sequences
        .iter()
        .filter(|s| s.side == side)
        .map(|s| ((s.insider_id.as_str(), s.company.as_str()), s))
        .collect();
    // In Overlap mode the shared dates are the plain date-set intersection,
    // which the Subsequence witness yields.
    let witness_variant = match config.similarity.mode {
        SimilarityMode::Lcs => config.similarity.lcs_variant,
        SimilarityMode::Overlap => LcsVariant::Subsequence,
    };

    let mut all_points = Vec::new();
    let mut summaries = Vec::new();
    for record in records.iter().take(config.top_n) {
        let insider = record.insider_id.as_str();
        let mut skipped = SkippedCounts::default();
        let mut insider_points = Vec::new();
        for (company, dates) in
            egonet_shared_dates(net, &seq_index, insider, witness_variant)
        {
            let (points, s) = profit_series(insider, &company, side, &dates, trades, quotes);
            insider_points.extend(points);
            skipped.missing_price += s.missing_price;
            skipped.missing_quote += s.missing_quote;
        }
        summaries.push(summarize(insider, &insider_points, skipped));
        all_points.extend(insider_points);
    }
    (all_points, summaries)
}

fn multi_hyperedge_profits(
    config: &PipelineConfig,
    side: Side,
    h: &Hypergraph,
    trades: &[TradeRecord],
    quotes: &QuoteTable,
) -> (Vec<ProfitPoint>, Vec<ProfitSummaryEntry>) {
    let mut all_points = Vec::new();
    let mut summaries = Vec::new();
    for (insider, incident) in multi_edge_insiders(h, config.min_hyperedges) {
        let mut by_company: BTreeMap<String, BTreeSet<NaiveDate>> = BTreeMap::new();
        for idx in incident {
            let edge = &h.hyperedges[idx];
            by_company
                .entry(edge.company.clone())
                .or_default()
                .extend(edge.witness.iter().copied());
        }
        let mut skipped = SkippedCounts::default();
        let mut insider_points = Vec::new();
        for (company, dates) in by_company {
            let (points, s) = profit_series(&insider, &company, side, &dates, trades, quotes);
            insider_points.extend(points);
            skipped.missing_price += s.missing_price;
            skipped.missing_quote += s.missing_quote;
        }
        summaries.push(summarize(&insider, &insider_points, skipped));
        all_points.extend(insider_points);
    }
    (all_points, summaries)
}

/// Parses input files and reports row-level findings without writing
/// artifacts.
pub fn ingest_check(
    trades_path: &Path,
    quotes_path: Option<&Path>,
    strict: bool,
) -> Result<String, PipelineError> {
    let mut out = String::new();
    let reader = open(trades_path)?;
    let (trades, errors) = parse_trades(reader, IngestConfig { strict })
        .map_err(|e| map_ingest_error(e, trades_path))?;
    out.push_str(&format!(
        "trades {}: {} rows parsed, {} malformed\n",
        trades_path.display(),
        trades.len(),
        errors.len()
    ));
    for e in &errors {
        out.push_str(&format!("  {e}\n"));
    }
    if let Some(path) = quotes_path {
        let reader = open(path)?;
        let (quotes, errors) =
            parse_quotes(reader).map_err(|e| map_ingest_error(e, path))?;
        out.push_str(&format!(
            "quotes {}: {} rows parsed, {} malformed\n",
            path.display(),
            quotes.len(),
            errors.len()
        ));
        for e in &errors {
            out.push_str(&format!("  {e}\n"));
        }
    }
    let sequences = build_date_sequences(&trades, 5);
    out.push_str(&format!(
        "sequences: {} groups with >= 5 trades\n",
        sequences.len()
    ));
    Ok(out)
}

/// Generates a synthetic dataset into `out_dir` as `trades.csv`,
/// `quotes.csv`, and `ground_truth.json`.
pub fn run_synth(config: &SynthConfig, out_dir: &Path) -> Result<String, PipelineError> {
    let output = generate(config, Exec::Parallel)
        .map_err(|e| PipelineError::Input(e.to_string()))?;
    fs::create_dir_all(out_dir)
        .map_err(|e| PipelineError::Input(format!("cannot create {}: {e}", out_dir.display())))?;
    write(&out_dir.join("trades.csv"), &output.trades_csv)?;
    write(&out_dir.join("quotes.csv"), &output.quotes_csv)?;
    write(
        &out_dir.join("ground_truth.json"),
        &ground_truth_to_json(&output.ground_truth),
    )?;
    Ok(format!(
        "wrote trades.csv, quotes.csv, ground_truth.json to {} ({} cliques, {} hubs)",
        out_dir.display(),
        output.ground_truth.cliques.len(),
        output.ground_truth.hubs.len()
    ))
}

/// Runs `f` inside a rayon pool of `threads` workers (0 or None means the
/// default). Without the `parallel` feature the cap is a no-op.
#[cfg(feature = "parallel")]
pub fn with_thread_cap<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, PipelineError> {
    match threads {
        Some(n) if n >= 1 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| PipelineError::Input(format!("cannot build thread pool: {e}")))
            .map(|pool| pool.install(f)),
        _ => Ok(f()),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_thread_cap<T>(
    _threads: Option<usize>,
    f: impl FnOnce() -> T,
) -> Result<T, PipelineError> {
    Ok(f())
}
