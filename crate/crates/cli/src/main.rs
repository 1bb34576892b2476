use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod pair;
mod pathio;

/// Exit code for input/validation failures (runtime failures exit 1).
const EXIT_INPUT: u8 = 2;

#[derive(Parser)]
#[command(
    name = "sigtrade",
    version,
    about = "Signature stopping policies for mean-reversion spread trading",
    after_help = "All commands are deterministic given their flags and config file; \
                  randomized commands take a --seed (default 42). Flags override \
                  config-file values."
)]
struct Cli {
    /// JSON config file ('config_version': 1); flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the graded signature of a CSV path as JSON
    Sig(commands::sig::SigArgs),
    /// Simulate an Ornstein-Uhlenbeck path to CSV
    Simulate(commands::simulate::SimulateArgs),
    /// Fit OU parameters to a 1-D series by exact-transition MLE
    Fit(commands::fit::FitArgs),
    /// Train one stopping policy on simulated OU samples
    Train(commands::train::TrainArgs),
    /// Mean stopped values across an OU parameter sweep
    Table1(commands::table1::Table1Args),
    /// Run the sequential entry/exit strategy on a pair manifest
    Trade(commands::trade::TradeArgs),
    /// Strategy-vs-baseline comparison on a pair manifest
    Compare(commands::compare::CompareArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file = match config::load(cli.config.as_deref()) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let result = match cli.command {
        Command::Sig(args) => commands::sig::run(args, &file),
        Command::Simulate(args) => commands::simulate::run(args, &file),
        Command::Fit(args) => commands::fit::run(args, &file),
        Command::Train(args) => commands::train::run(args, &file),
        Command::Table1(args) => commands::table1::run(args, &file),
        Command::Trade(args) => commands::trade::run(args, &file),
        Command::Compare(args) => commands::compare::run(args, &file),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_input_error() {
                ExitCode::from(EXIT_INPUT)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
