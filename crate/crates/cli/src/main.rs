mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "emofuse", version, about = "Skeleton features, rule bundles, SVMs and vote fusion for emotion recognition")]
struct Cli {
    #[command(flatten)]
    shared: SharedArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct SharedArgs {
    /// Run configuration (TOML); flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Seed for every randomized step; recorded in each output header.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Output directory (created if missing). Defaults to the current directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cut skeleton streams into windows and write a feature CSV.
    Extract(commands::extract::ExtractArgs),
    /// Fit rule-bundle intervals on tagged exemplar windows.
    Calibrate(commands::calibrate::CalibrateArgs),
    /// Train a one-vs-one RBF SVM, optionally with k-fold cross-validation.
    Train(commands::train::TrainArgs),
    /// Replay votes through the fusion buffer, or sweep buffer sizes.
    Fuse(commands::fuse::FuseArgs),
    /// Metrics from confusion matrices, diffs against reference tables, label mappings.
    Eval(commands::eval::EvalArgs),
}

/// Resolved shared settings handed to each command.
pub struct Context {
    pub config: RunConfig,
    pub seed: u64,
    pub out: PathBuf,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = match &cli.shared.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let seed = cli.shared.seed.or(config.seed).unwrap_or(config::DEFAULT_SEED);
    let out = cli.shared.out.clone().or_else(|| config.out.clone()).unwrap_or_else(|| PathBuf::from("."));
    let ctx = Context { config, seed, out };
    match cli.command {
        Command::Extract(a) => commands::extract::run(&ctx, a),
        Command::Calibrate(a) => commands::calibrate::run(&ctx, a),
        Command::Train(a) => commands::train::run(&ctx, a),
        Command::Fuse(a) => commands::fuse::run(&ctx, a),
        Command::Eval(a) => commands::eval::run(&ctx, a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).format_timestamp(None).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("emofuse: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
