use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

use cotrade::synth::SynthConfig;
use cotrade::types::Side;
use cotrade_cli::config::{resolve, AnalysisOpts};
use cotrade_cli::error::PipelineError;
use cotrade_cli::pipeline::{ingest_check, run_pipeline, run_synth, with_thread_cap, Stages};

/// Co-trading network analysis over insider trade filings.
#[derive(Parser)]
#[command(name = "cotrade", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse input files and report malformed rows.
    IngestCheck {
        #[command(flatten)]
        opts: AnalysisOpts,
    },
    /// Build the insider network(s) and component statistics.
    BuildNet {
        #[command(flatten)]
        opts: AnalysisOpts,
    },
    /// Mine maximal co-trading hyperedges.
    MineHyper {
        #[command(flatten)]
        opts: AnalysisOpts,
    },
    /// Fit the egonet power law and write outlier scores.
    Score {
        #[command(flatten)]
        opts: AnalysisOpts,
    },
    /// Evaluate profit for flagged insiders over shared dates.
    Profit {
        #[command(flatten)]
        opts: AnalysisOpts,
    },
    /// Generate a synthetic dataset with planted structures.
    Synth(SynthOpts),
    /// Run every stage end to end.
    Pipeline {
        #[command(flatten)]
        opts: AnalysisOpts,
    },
}

/// Inclusive `lo-hi` range (or a single value) for synth flags.
#[derive(Debug, Clone, Copy)]
struct RangeArg(usize, usize);

impl std::str::FromStr for RangeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |x: &str| {
            x.parse::<usize>()
                .map_err(|_| format!("bad range bound {x:?}"))
        };
        match s.split_once('-') {
            Some((lo, hi)) => Ok(RangeArg(parse(lo)?, parse(hi)?)),
            None => {
                let v = parse(s)?;
                Ok(RangeArg(v, v))
            }
        }
    }
}

#[derive(Args)]
struct SynthOpts {
    /// Output directory for trades.csv, quotes.csv, ground_truth.json.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    companies: usize,
    /// Background insiders per company, e.g. 5-15.
    #[arg(long, default_value = "5-15")]
    insiders: RangeArg,
    /// Trades per background insider, e.g. 6-12.
    #[arg(long, default_value = "6-12")]
    trades: RangeArg,
    #[arg(long, default_value = "2014-01-01")]
    from: NaiveDate,
    #[arg(long, default_value = "2014-12-31")]
    to: NaiveDate,
    #[arg(long, default_value_t = 0)]
    cliques: usize,
    /// Members per planted clique, e.g. 3-6.
    #[arg(long, default_value = "3-6")]
    clique_size: RangeArg,
    /// Length of each planted shared date window.
    #[arg(long, default_value_t = 5)]
    shared_len: usize,
    #[arg(long, default_value_t = 0)]
    hubs: usize,
    #[arg(long, default_value_t = 3)]
    cliques_per_hub: usize,
    /// Probability a planted-group trade is priced favorably.
    #[arg(long, default_value_t = 0.5)]
    profit_bias: f64,
    /// Side on which planted structures trade.
    #[arg(long, value_enum, default_value_t = PlantedSide::Sale)]
    side: PlantedSide,
    /// Cap worker parallelism at N threads.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum PlantedSide {
    Purchase,
    Sale,
}

impl From<&SynthOpts> for SynthConfig {
    fn from(o: &SynthOpts) -> Self {
        SynthConfig {
            seed: o.seed,
            n_companies: o.companies,
            insiders_per_company: (o.insiders.0, o.insiders.1),
            trades_per_insider: (o.trades.0, o.trades.1),
            date_span: (o.from, o.to),
            n_planted_cliques: o.cliques,
            clique_size: (o.clique_size.0, o.clique_size.1),
            shared_subsequence_length: o.shared_len,
            n_planted_hubs: o.hubs,
            cliques_per_hub: o.cliques_per_hub,
            profit_bias: o.profit_bias,
            planted_side: match o.side {
                PlantedSide::Purchase => Side::Purchase,
                PlantedSide::Sale => Side::Sale,
            },
        }
    }
}

fn run(cli: Cli) -> Result<String, PipelineError> {
    match cli.command {
        Command::IngestCheck { opts } => {
            let config = resolve(&opts, false)?;
            ingest_check(&config.trades, config.quotes.as_deref(), config.strict)
        }
        Command::BuildNet { opts } => {
            run_stages(&opts, false, Stages { network: true, ..Stages::default() })
        }
        Command::MineHyper { opts } => {
            run_stages(&opts, false, Stages { hyper: true, ..Stages::default() })
        }
        Command::Score { opts } => run_stages(
            &opts,
            false,
            Stages { network: true, score: true, ..Stages::default() },
        ),
        Command::Profit { opts } => run_stages(
            &opts,
            true,
            Stages { score: true, profit: true, ..Stages::default() },
        ),
        Command::Synth(opts) => {
            let config = SynthConfig::from(&opts);
            with_thread_cap(opts.threads, move || run_synth(&config, &opts.out))?
        }
        Command::Pipeline { opts } => {
            let config = resolve(&opts, true)?;
            let stages = Stages::all(config.profit);
            with_thread_cap(config.threads, move || {
                run_pipeline(&config, stages).map(|r| r.render())
            })?
        }
    }
}

fn run_stages(
    opts: &AnalysisOpts,
    profit_default: bool,
    mut stages: Stages,
) -> Result<String, PipelineError> {
    let config = resolve(opts, profit_default)?;
    stages.profit = stages.profit && config.profit;
    with_thread_cap(config.threads, move || {
        run_pipeline(&config, stages).map(|r| r.render())
    })?
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(report) => println!("{report}"),
        Err(e) => {
            eprintln!("{}", e.to_json());
            std::process::exit(e.exit_code());
        }
    }
}
