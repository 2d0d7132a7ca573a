//! `abba` — symbolic time series approximation from the command line.
//!
//! Exit codes: 0 success, 2 parse/usage errors, 3 alphabet exhaustion,
//! 4 symbol decode errors, 5 bound violations, 1 anything else.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use abba_core::{Digitizer, Variant};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "abba",
    version,
    about = "Symbolic time series approximation: compress, digitize, invert, verify, forecast"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a model on a CSV of series (one per column) and write symbols
    Fit(FitArgs),
    /// Symbolize out-of-sample series against a fitted model
    Transform(TransformArgs),
    /// Reconstruct numerical series from symbol sequences
    Inverse(InverseArgs),
    /// Fit, invert, and report reconstruction metrics plus every bound
    Roundtrip(RoundtripArgs),
    /// Substitute one symbol and report how the error propagates
    Perturb(PerturbArgs),
    /// Rank-frequency profile of symbol files
    Zipf(ZipfArgs),
    /// Symbol-level forecasting with an n-gram predictor
    Forecast(ForecastArgs),
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|_| "expected apca or fapca".to_string())
}

fn parse_digitizer(s: &str) -> Result<Digitizer, String> {
    s.parse().map_err(|_| "expected greedy or lloyd".to_string())
}

#[derive(Args)]
struct FitArgs {
    /// Input CSV, one series per column, optional header row
    #[arg(long)]
    input: PathBuf,
    /// Compression tolerance
    #[arg(long)]
    tol: f64,
    /// Greedy aggregation radius (required with --digitizer greedy)
    #[arg(long)]
    alpha: Option<f64>,
    /// Weight of the length coordinate in clustering space
    #[arg(long, default_value_t = 1.0)]
    scl: f64,
    /// apca (increments) or fapca (pinned endpoint values)
    #[arg(long, value_parser = parse_variant, default_value = "apca")]
    variant: Variant,
    /// greedy or lloyd
    #[arg(long, value_parser = parse_digitizer, default_value = "greedy")]
    digitizer: Digitizer,
    /// Cluster count (required with --digitizer lloyd)
    #[arg(long)]
    k: Option<usize>,
    /// Seed for lloyd center seeding
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// builtin, ascii, or a one-token-per-line file
    #[arg(long, default_value = "builtin")]
    alphabet: String,
    /// Where to write the model JSON
    #[arg(long)]
    model: PathBuf,
    /// Where to write the symbols, one line per column
    #[arg(long)]
    symbols: PathBuf,
    /// z-normalize each column before compression
    #[arg(long)]
    znorm: bool,
    /// Fit one model per column instead of a shared codebook
    #[arg(long)]
    independent: bool,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    input: PathBuf,
    /// Compression tolerance; defaults to the model's
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    symbols: PathBuf,
    #[arg(long)]
    znorm: bool,
}

#[derive(Args)]
struct InverseArgs {
    #[arg(long)]
    model: PathBuf,
    /// Symbols file, one sequence per line
    #[arg(long)]
    symbols: PathBuf,
    /// Anchor value(s): one number, or comma-separated per sequence
    #[arg(long)]
    t0: String,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct RoundtripArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    tol: f64,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    scl: f64,
    #[arg(long, value_parser = parse_variant, default_value = "apca")]
    variant: Variant,
    #[arg(long, value_parser = parse_digitizer, default_value = "greedy")]
    digitizer: Digitizer,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "builtin")]
    alphabet: String,
    #[arg(long)]
    znorm: bool,
    /// Fit one model per column instead of a shared codebook
    #[arg(long)]
    independent: bool,
    /// Emit bound reports as a JSON array instead of a table
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct PerturbArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    symbols: PathBuf,
    /// Which sequence (line) of the symbols file to perturb
    #[arg(long, default_value_t = 0)]
    line: usize,
    /// Piece index to substitute
    #[arg(long)]
    position: usize,
    /// Replacement symbol
    #[arg(long)]
    replacement: String,
    #[arg(long)]
    t0: f64,
}

#[derive(Args)]
struct ZipfArgs {
    /// Symbol files to pool
    #[arg(long, required = true, num_args = 1..)]
    symbols: Vec<PathBuf>,
    /// Model used to tokenize multi-character symbols exactly
    #[arg(long)]
    model: Option<PathBuf>,
    /// Output CSV: rank,frequency,log_rank,log_frequency
    #[arg(long)]
    csv: PathBuf,
}

#[derive(Args)]
struct ForecastArgs {
    #[arg(long)]
    model: PathBuf,
    /// History CSV, one series per column
    #[arg(long)]
    history: PathBuf,
    /// Number of values to forecast per column
    #[arg(long)]
    horizon: usize,
    /// n-gram context length
    #[arg(long, default_value_t = 3)]
    predictor_order: usize,
    /// Smoothing constant for the sampled mode
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// greedy or sample
    #[arg(long, default_value = "greedy")]
    mode: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Compression tolerance; defaults to the model's
    #[arg(long)]
    tol: Option<f64>,
    /// Truth CSV for MSE/MAE scoring against the forecast
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Forecast CSV destination; stdout when omitted
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    znorm: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Fit(args) => commands::cmd_fit(args),
        Command::Transform(args) => commands::cmd_transform(args),
        Command::Inverse(args) => commands::cmd_inverse(args),
        Command::Roundtrip(args) => commands::cmd_roundtrip(args),
        Command::Perturb(args) => commands::cmd_perturb(args),
        Command::Zipf(args) => commands::cmd_zipf(args),
        Command::Forecast(args) => commands::cmd_forecast(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code.clamp(1, 255) as u8)
        }
    }
}
