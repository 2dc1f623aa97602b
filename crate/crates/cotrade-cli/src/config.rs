//! Resolved pipeline configuration. Values come from three layers with
//! increasing precedence: built-in defaults, an optional TOML config file,
//! and command-line flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use cotrade::anomaly::AnomalyConfig;
use cotrade::similarity::{LcsVariant, SimilarityConfig, SimilarityMode};
use cotrade::types::Side;

use crate::error::PipelineError;

/// Which sides to analyze.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum SideSelection {
    Purchase,
    Sale,
    #[default]
    Both,
}

impl SideSelection {
    pub fn sides(self) -> Vec<Side> {
        match self {
            SideSelection::Purchase => vec![Side::Purchase],
            SideSelection::Sale => vec![Side::Sale],
            SideSelection::Both => vec![Side::Purchase, Side::Sale],
        }
    }
}

/// Fully resolved configuration for one run.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub trades: PathBuf,
    pub quotes: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub sides: Vec<Side>,
    pub min_trades: usize,
    pub similarity: SimilarityConfig,
    pub anomaly: AnomalyConfig,
    pub top_n: usize,
    pub min_hyperedges: usize,
    pub strict: bool,
    pub threads: Option<usize>,
    pub profit: bool,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        self.similarity
            .validate()
            .map_err(PipelineError::Input)?;
        if self.min_trades < 1 {
            return Err(PipelineError::Input("min_trades must be >= 1".into()));
        }
        if self.top_n < 1 {
            return Err(PipelineError::Input("top_n must be >= 1".into()));
        }
        if self.min_hyperedges < 2 {
            return Err(PipelineError::Input("min_hyperedges must be >= 2".into()));
        }
        if let Some(b) = self.anomaly.bin_base {
            if b <= 1.0 {
                return Err(PipelineError::Input(format!(
                    "bin_base must exceed 1.0, got {b}"
                )));
            }
        }
        Ok(())
    }
}

/// Raw analysis options as given on the command line; `None` means "not
/// specified, fall through to the config file or the default".
#[derive(Debug, Clone, Default, clap::Args)]
pub struct AnalysisOpts {
    /// Trades CSV path.
    #[arg(long)]
    pub trades: Option<PathBuf>,
    /// Quotes CSV path (needed by the profit stage).
    #[arg(long)]
    pub quotes: Option<PathBuf>,
    /// Output directory for artifacts.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Side(s) to analyze.
    #[arg(long, value_enum)]
    pub side: Option<SideSelection>,
    /// Edge criterion: date-overlap score or LCS length.
    #[arg(long, value_enum)]
    pub mode: Option<ModeOpt>,
    /// Minimum overlap score S for an edge (Overlap mode).
    #[arg(long)]
    pub overlap_threshold: Option<f64>,
    /// LCS threshold t for both sides (shorthand).
    #[arg(long)]
    pub t: Option<usize>,
    /// LCS threshold t for the sale network.
    #[arg(long)]
    pub t_sale: Option<usize>,
    /// LCS threshold t for the purchase network.
    #[arg(long)]
    pub t_purchase: Option<usize>,
    /// Subsequence semantics for LCS measures.
    #[arg(long, value_enum)]
    pub lcs_variant: Option<VariantOpt>,
    /// Minimum trades per (insider, company, side) group.
    #[arg(long)]
    pub min_trades: Option<usize>,
    /// LOF neighborhood size (default: min(10, n-1)).
    #[arg(long)]
    pub k: Option<usize>,
    /// Logarithmic binning base for the power-law fit.
    #[arg(long)]
    pub bin_base: Option<f64>,
    /// Min-max normalize score and LOF before summing.
    #[arg(long)]
    pub normalize: bool,
    /// How many top-ranked outliers to report and evaluate.
    #[arg(long)]
    pub top_n: Option<usize>,
    /// Minimum incident hyperedges for the multi-hyperedge report.
    #[arg(long)]
    pub min_hyperedges: Option<usize>,
    /// Fail on any malformed input row.
    #[arg(long)]
    pub strict: bool,
    /// Cap worker parallelism at N threads.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Skip the profit-evaluation stage.
    #[arg(long)]
    pub no_profit: bool,
    /// TOML config file; flags override its values.
    #[arg(long, env = "COTRADE_CONFIG")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ModeOpt {
    Overlap,
    Lcs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum VariantOpt {
    Subsequence,
    ContiguousRun,
}

/// Config-file schema: every key optional, same names as the flags.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub trades: Option<PathBuf>,
    pub quotes: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub side: Option<String>,
    pub mode: Option<String>,
    pub overlap_threshold: Option<f64>,
    pub t: Option<usize>,
    pub t_sale: Option<usize>,
    pub t_purchase: Option<usize>,
    pub lcs_variant: Option<String>,
    pub min_trades: Option<usize>,
    pub k: Option<usize>,
    pub bin_base: Option<f64>,
    pub normalize: Option<bool>,
    pub top_n: Option<usize>,
    pub min_hyperedges: Option<usize>,
    pub strict: Option<bool>,
    pub threads: Option<usize>,
    pub profit: Option<bool>,
}

pub fn load_file_config(path: &Path) -> Result<FileConfig, PipelineError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| PipelineError::Input(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| PipelineError::Input(format!("bad config {}: {e}", path.display())))
}

fn parse_side_selection(s: &str) -> Result<SideSelection, PipelineError> {
    match s {
        "purchase" => Ok(SideSelection::Purchase),
        "sale" => Ok(SideSelection::Sale),
        "both" => Ok(SideSelection::Both),
        other => Err(PipelineError::Input(format!(
            "side must be purchase, sale, or both; got {other:?}"
        ))),
    }
}

fn parse_mode(s: &str) -> Result<SimilarityMode, PipelineError> {
    match s {
        "overlap" => Ok(SimilarityMode::Overlap),
        "lcs" => Ok(SimilarityMode::Lcs),
        other => Err(PipelineError::Input(format!(
            "mode must be overlap or lcs; got {other:?}"
        ))),
    }
}

fn parse_variant(s: &str) -> Result<LcsVariant, PipelineError> {
    match s {
        "subsequence" => Ok(LcsVariant::Subsequence),
        "contiguous_run" | "contiguous-run" => Ok(LcsVariant::ContiguousRun),
        other => Err(PipelineError::Input(format!(
            "lcs_variant must be subsequence or contiguous-run; got {other:?}"
        ))),
    }
}

/// Merges flags over the file config over defaults. `require_quotes` makes
/// the quotes path mandatory (profit-bearing subcommands).
pub fn resolve(opts: &AnalysisOpts, profit_default: bool) -> Result<PipelineConfig, PipelineError> {
    let file = match &opts.config {
        Some(path) => load_file_config(path)?,
        None => FileConfig::default(),
    };

    let defaults = SimilarityConfig::default();
    let trades = opts
        .trades
        .clone()
        .or(file.trades)
        .ok_or_else(|| PipelineError::Input("no trades file given (--trades)".into()))?;

    let side = match opts.side {
        Some(s) => s,
        None => match &file.side {
            Some(s) => parse_side_selection(s)?,
            None => SideSelection::Both,
        },
    };
    let mode = match opts.mode {
        Some(ModeOpt::Overlap) => SimilarityMode::Overlap,
        Some(ModeOpt::Lcs) => SimilarityMode::Lcs,
        None => match &file.mode {
            Some(s) => parse_mode(s)?,
            None => defaults.mode,
        },
    };
    let lcs_variant = match opts.lcs_variant {
        Some(VariantOpt::Subsequence) => LcsVariant::Subsequence,
        Some(VariantOpt::ContiguousRun) => LcsVariant::ContiguousRun,
        None => match &file.lcs_variant {
            Some(s) => parse_variant(s)?,
            None => defaults.lcs_variant,
        },
    };
    // --t is shorthand for both sides; the per-side flags win over it.
    let t_shared = opts.t.or(file.t);
    let similarity = SimilarityConfig {
        mode,
        overlap_threshold: opts
            .overlap_threshold
            .or(file.overlap_threshold)
            .unwrap_or(defaults.overlap_threshold),
        lcs_threshold_sale: opts
            .t_sale
            .or(file.t_sale)
            .or(t_shared)
            .unwrap_or(defaults.lcs_threshold_sale),
        lcs_threshold_purchase: opts
            .t_purchase
            .or(file.t_purchase)
            .or(t_shared)
            .unwrap_or(defaults.lcs_threshold_purchase),
        lcs_variant,
    };

    let config = PipelineConfig {
        trades,
        quotes: opts.quotes.clone().or(file.quotes),
        out_dir: opts.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("out")),
        sides: side.sides(),
        min_trades: opts.min_trades.or(file.min_trades).unwrap_or(5),
        similarity,
        anomaly: AnomalyConfig {
            k: opts.k.or(file.k),
            bin_base: opts.bin_base.or(file.bin_base),
            normalize: opts.normalize || file.normalize.unwrap_or(false),
        },
        top_n: opts.top_n.or(file.top_n).unwrap_or(10),
        min_hyperedges: opts.min_hyperedges.or(file.min_hyperedges).unwrap_or(4),
        strict: opts.strict || file.strict.unwrap_or(false),
        threads: opts.threads.or(file.threads),
        profit: if opts.no_profit {
            false
        } else {
            file.profit.unwrap_or(profit_default)
        },
    };
    config.validate()?;
    Ok(config)
}
