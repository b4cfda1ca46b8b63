//! `tempsort`: generate data, train, evaluate, predict and export.
//!
//! Exit codes: 0 on success, 1 on runtime errors, 2 on usage errors.

mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand};

use tempsort::dgp::DgpKind;

/// A configuration or flag problem, reported with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Parser)]
#[command(name = "tempsort", version, about = "Sort alternatives described by multi-criteria time series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides `eval.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `eval.jobs` (worker threads for folds).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic dataset.
    Generate {
        #[arg(long, value_parser = parse_kind)]
        kind: DgpKind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        criteria: usize,
        #[arg(long, default_value_t = 20)]
        horizon: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit one model on an 80/20 train/validation split and save it.
    Train(RunArgs),
    /// Cross-validate the configured model, or score a saved one with --model.
    Evaluate {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Assign every alternative of a dataset file to a class.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Accepted for uniformity; prediction is deterministic.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write marginals.csv (and discounts.csv for the network) into a directory.
    Export {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Alternatives used for probes and discount traces.
        #[arg(long, default_value_t = 100)]
        sample: usize,
        /// Accepted for uniformity; export is deterministic.
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn parse_kind(s: &str) -> Result<DgpKind, String> {
    s.parse().map_err(|_| format!("expected one of: basic, non-markovian, non-monotonic, non-independent; got `{s}`"))
}

fn load(run: &RunArgs) -> anyhow::Result<config::RunConfig> {
    let mut config = commands::read_config(&run.config)?;
    if let Some(seed) = run.seed {
        config.eval.seed = seed;
    }
    if let Some(jobs) = run.jobs {
        if jobs == 0 {
            return Err(UsageError("--jobs must be at least 1".into()).into());
        }
        config.eval.jobs = jobs;
    }
    Ok(config)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Generate { kind, n, seed, criteria, horizon, out } => {
            commands::generate_cmd(kind, n, seed, criteria, horizon, &out)
        }
        Command::Train(args) => commands::train_cmd(&load(&args)?).map(|_| ()),
        Command::Evaluate { run, model } => commands::evaluate_cmd(&load(&run)?, model.as_deref()),
        Command::Predict { model, data, out, .. } => commands::predict_cmd(&model, &data, &out),
        Command::Export { model, data, out, sample, .. } => commands::export_cmd(&model, &data, &out, sample),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            eprint!("{}", e.render());
            eprintln!("\n{}", Cli::command().render_usage());
            return ExitCode::from(2);
        }
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
