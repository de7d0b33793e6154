//! `cpm`: encodings, models, graph ranges and decay statistics from the shell.
//!
//! Exit status is 0 on success, 1 for bad input and 2 when a check command
//! reaches a negative verdict (refuted, rejected, excluded).

mod encode;
mod model;
mod out;
mod range;
mod spec;
mod stats;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cpm_core::Budget;

use out::{Format, Out};

#[derive(Parser, Debug)]
#[command(
    name = "cpm",
    version,
    about = "Workbench for computable physical models"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Enumerator indices an r.e. process may visit (command-specific default)
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Step cap for every single evaluation
    #[arg(long, global = true, default_value_t = Budget::DEFAULT_STEPS)]
    pub steps: u64,
    /// First seed for simulated measurements
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Coefficient height bound for graph ranges
    #[arg(long, global = true, default_value_t = 4)]
    pub height: u64,
    /// Chain length bound for graph ranges
    #[arg(long, global = true, default_value_t = 3)]
    pub chain: u64,
    /// Decimal digits for enclosures of algebraic numbers
    #[arg(long, global = true, default_value_t = 6)]
    pub digits: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    pub format: Format,
}

impl Global {
    pub fn budget_or(&self, states: u64) -> Budget {
        Budget::new(self.budget.unwrap_or(states), self.steps)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Encode values as nonnegative integers
    #[command(subcommand)]
    Encode(encode::EncodeCmd),
    /// Decode nonnegative integers
    #[command(subcommand)]
    Decode(encode::DecodeCmd),
    /// Faithfulness checks and the model algebra
    #[command(subcommand)]
    Model(model::ModelCmd),
    /// Graph ranges of real maps
    #[command(subcommand)]
    Range(range::RangeCmd),
    /// Binomial decay statistics
    #[command(subcommand)]
    Stats(stats::StatsCmd),
    /// Model spec files
    #[command(subcommand)]
    Spec(spec::SpecCmd),
}

/// How a successful command ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A check came out negative.
    Verdict,
}

fn run(cli: &Cli, out: &mut Out) -> anyhow::Result<Status> {
    let g = &cli.global;
    match &cli.command {
        Command::Encode(c) => encode::encode(c, out),
        Command::Decode(c) => encode::decode(c, out),
        Command::Model(c) => model::run(c, g, out),
        Command::Range(c) => range::run(c, g, out),
        Command::Stats(c) => stats::run(c, g, out),
        Command::Spec(c) => spec::run(c, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut out = Out::new(cli.global.format);
    let res = run(&cli, &mut out);
    out.flush();
    match res {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Verdict) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
