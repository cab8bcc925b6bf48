use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mixscope::cycle::Coloring;
use mixscope::shuffle::{Deck, StatisticKind};
use mixscope::sst::{ChainFamily, PredicateKind};
use mixscope_cli::{
    budget_from_env, render, run_experiment, write_atomic, CliError, Experiment, ExperimentConfig, Format, RunMode,
};

/// Exact mixing analysis for statistics of shuffles and cycle walks.
#[derive(Parser, Debug)]
#[command(name = "mixscope", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Output format.
    #[arg(long, global = true, default_value = "json")]
    format: Format,
    /// Write the report to this file (atomically) instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for Monte-Carlo mode.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of sampled paths; switches sst-check to Monte-Carlo mode.
    #[arg(long, global = true, conflicts_with = "exact")]
    samples: Option<u64>,
    /// Exact enumeration (the default).
    #[arg(long, global = true)]
    exact: bool,
    /// Print rationals as floating-point numbers.
    #[arg(long, global = true)]
    float: bool,
    /// Include wall-clock duration in the report.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Separation and total variation of a deck statistic for t = 0..=T.
    StatMix {
        #[arg(long)]
        chain: ChainFamily,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        statistic: StatisticKind,
    },
    /// Certify or refute a candidate strong stationary time.
    SstCheck {
        #[arg(long)]
        chain: ChainFamily,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        statistic: StatisticKind,
        #[arg(long)]
        predicate: PredicateKind,
        /// Starting deck as comma-separated cards, top first.
        #[arg(long)]
        start: Option<String>,
        /// Semicolon-separated statistic values to restrict the conditional law to.
        #[arg(long)]
        restrict: Option<String>,
    },
    /// Color mixing of the lazy walk on a colored cycle.
    Cycle {
        #[arg(long)]
        coloring: Coloring,
        #[arg(long, default_value_t = 0)]
        x0: usize,
        #[arg(long, default_value_t = 100)]
        horizon: usize,
        /// Explicit alternating sets, e.g. "0,2,3,5;1,4".
        #[arg(long)]
        sets: Option<String>,
        /// Comma-separated Chebyshev constants c.
        #[arg(long, value_delimiter = ',')]
        chebyshev: Vec<f64>,
        /// Check red dominance from x0.
        #[arg(long)]
        dominance: bool,
    },
    /// Alternating number and decomposition of a coloring.
    Decompose {
        #[arg(long)]
        coloring: Coloring,
        /// Confirm by exhaustive search that no smaller partition exists.
        #[arg(long)]
        minimality: bool,
    },
    /// The failed top-card argument for the top-to-bottom mixture.
    Counterexample {
        #[arg(long, default_value_t = 52)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        t: usize,
    },
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn parse_list(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| usage(format!("bad integer {x:?}"))))
        .collect()
}

fn config(cli: Cli) -> Result<ExperimentConfig, CliError> {
    let experiment = match cli.command {
        Command::StatMix { chain, n, t, statistic } => Experiment::StatMix { chain, n, t, statistic },
        Command::SstCheck { chain, n, t, statistic, predicate, start, restrict } => Experiment::SstCheck {
            chain,
            n,
            t,
            statistic,
            predicate,
            start: start
                .map(|s| {
                    let cards = parse_list(&s)?
                        .into_iter()
                        .map(|c| u8::try_from(c).map_err(|_| usage(format!("card {c} too large"))))
                        .collect::<Result<Vec<u8>, _>>()?;
                    Deck::new(cards).map_err(CliError::from)
                })
                .transpose()?,
            restrict: restrict.map(|r| r.split(';').map(|v| v.trim().to_string()).collect()),
        },
        Command::Cycle { coloring, x0, horizon, sets, chebyshev, dominance } => Experiment::Cycle {
            coloring,
            x0,
            horizon,
            sets: sets.map(|s| s.split(';').map(parse_list).collect()).transpose()?,
            chebyshev,
            dominance,
        },
        Command::Decompose { coloring, minimality } => Experiment::Decompose { coloring, minimality },
        Command::Counterexample { n, t } => Experiment::Counterexample { n, t },
    };
    let mode = match (cli.global.samples, cli.global.seed) {
        (Some(samples), Some(seed)) => RunMode::MonteCarlo { samples, seed },
        (Some(_), None) => return Err(usage("--samples needs --seed")),
        (None, _) => RunMode::Exact,
    };
    let mut cfg = ExperimentConfig::new(experiment);
    cfg.mode = mode;
    cfg.format = cli.global.format;
    cfg.float = cli.global.float;
    cfg.timing = cli.global.timing;
    cfg.out = cli.global.out;
    cfg.budget = budget_from_env()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = config(cli)?;
    let report = run_experiment(&cfg)?;
    let text = render(&report, cfg.format, cfg.float)?;
    match &cfg.out {
        Some(path) => write_atomic(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.render().to_string();
            let first = message.lines().next().unwrap_or_default().trim_start_matches("error: ");
            let err = CliError::Usage(first.to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code());
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
