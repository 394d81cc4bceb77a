//! `sector-count`: exact lattice-point counts in thin sectors from the shell.

mod commands;
mod values;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "sector-count", version, about = "Exact lattice-point counting in thin circular sectors")]
struct Cli {
    /// Output format of the result stream (default: table; sweeps with a
    /// config or output file default to the config's format, else csv).
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Auto,
    Brute,
    Fast,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Paper,
    Optimal,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count S and Δ for one query.
    Count(CountArgs),
    /// List continued-fraction convergents with certified δ brackets.
    Convergents(ConvergentArgs),
    /// Regime and predicted error exponent for ε = R^-λ.
    Classify(ClassifyArgs),
    /// Run a sweep over a geometric R grid.
    Sweep(SweepArgs),
    /// Check that S = 0 over a grid for ε = c0·R^-λ.
    VerifyEmpty(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct CountArgs {
    /// Slope: `p/q`, `(a+b*sqrt(d))/c` or `sqrt(d)`.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
    /// Half-width: `m*2^-k` or `a/b`.
    #[arg(long, conflicts_with = "lambda", required_unless_present = "lambda")]
    pub eps: Option<String>,
    /// Schedule exponent: ε = c0·R^-λ (decimal or `a/b`).
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long, requires = "lambda")]
    pub c0: Option<String>,
    /// Radius (integer, decimal or `a/b`).
    #[arg(long = "R", alias = "radius")]
    pub radius: String,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    pub method: Method,
    /// Show the Δ⁺/Δ⁰/Δ⁻ partition and the d-window.
    #[arg(long)]
    pub breakdown: bool,
    #[arg(long, default_value_t = 100_000)]
    pub brute_ceiling: u64,
}

#[derive(Args, Debug)]
pub struct ConvergentArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
    /// Last convergent index to list.
    #[arg(long, default_value_t = 10)]
    pub depth: usize,
    /// Mark the convergent selected for this ε (`m*2^-k` or `a/b`).
    #[arg(long)]
    pub select_eps: Option<String>,
    /// Restrict selection to `q < R`.
    #[arg(long = "R", alias = "radius", requires = "select_eps")]
    pub radius: Option<String>,
    #[arg(long, value_enum, default_value_t = Mode::Paper, requires = "radius")]
    pub mode: Mode,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// `rational` or `eta:H` (irrational of type H ≥ 1).
    #[arg(long)]
    pub alpha_kind: String,
    #[arg(long)]
    pub lambda: String,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// `key = value` config file; flags below override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long)]
    pub c0: Option<String>,
    #[arg(long)]
    pub rmin: Option<String>,
    #[arg(long)]
    pub rmax: Option<String>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum)]
    pub counter: Option<Method>,
    /// Write rows here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub timing: bool,
    #[arg(long)]
    pub cross_check: bool,
    /// Suppress per-row progress on stderr.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(long)]
    pub lambda: String,
    #[arg(long)]
    pub c0: Option<String>,
    #[arg(long)]
    pub rmin: String,
    #[arg(long)]
    pub rmax: String,
    #[arg(long)]
    pub points: Option<usize>,
    /// Only rows with R above this must be empty (default: every row).
    #[arg(long)]
    pub threshold: Option<String>,
}

/// Failure classes and their exit codes.
#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Counter(String),
    Output(String),
    Violation(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Counter(_) => 3,
            CliError::Output(_) => 4,
            CliError::Violation(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::Counter(m) | CliError::Output(m) | CliError::Violation(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let format = cli.format.unwrap_or(Format::Table);
    let result = match &cli.command {
        Command::Count(a) => commands::count(a, format),
        Command::Convergents(a) => commands::convergents(a, format),
        Command::Classify(a) => commands::classify(a, format),
        Command::Sweep(a) => commands::sweep(a, cli.format),
        Command::VerifyEmpty(a) => commands::verify_empty(a, format),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
