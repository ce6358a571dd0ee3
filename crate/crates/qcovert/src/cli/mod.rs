//! Command-line front end. Exit codes: 0 success, 1 failed selftest or
//! numerical failure, 2 configuration error.

mod commands;
pub mod grid;
pub mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::ffi::OsString;
use std::path::PathBuf;

use crate::error::Error;
use grid::Grid;
use output::Format;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "qcovert", version, about = "Two-way covert quantum communication toolkit")]
pub struct Cli {
    /// Output directory (default: $QCOVERT_OUT_DIR or the working directory).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Receiver exponents, bounds and gains for one transmitter.
    #[command(arg_required_else_help = true)]
    Metrics(MetricsArgs),
    /// Ultimate collective/local bounds against the coherent-state values.
    #[command(arg_required_else_help = true)]
    Bounds(BoundsArgs),
    /// Gain curves versus N_S and maximal gain versus N_B.
    Figure3(Figure3Args),
    /// Covert photon budget and square-root-law bit counts.
    #[command(arg_required_else_help = true)]
    Covert(CovertArgs),
    /// Monte Carlo bit-error simulation.
    #[command(arg_required_else_help = true)]
    Simulate(SimulateArgs),
    /// Fock-space simulation of the qubit receiver SNR.
    Screceiver(ScReceiverArgs),
    /// Free-space link: transmissivity, thermal occupation, modes needed.
    Linkbudget(LinkArgs),
    /// Oracle cross-check suite.
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Transmitter {
    Coherent,
    Tmsv,
    Sc,
}

#[derive(Args, Debug, Serialize)]
pub struct MetricsArgs {
    #[arg(long, value_enum)]
    pub transmitter: Transmitter,
    /// Signal photons per mode: value or start:stop:lin|log[:points].
    #[arg(long = "NS", required = true)]
    pub ns: Grid,
    #[arg(long = "NB", required = true)]
    pub nb: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct BoundsArgs {
    #[arg(long = "NS", required = true)]
    pub ns: Grid,
    #[arg(long = "NB", required = true)]
    pub nb: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct Figure3Args {
    #[arg(long = "NB", default_value_t = 1e4)]
    pub nb: f64,
    #[arg(long = "NS-grid", default_value = "1e-4:1:log:41")]
    pub ns_grid: Grid,
    #[arg(long = "NB-grid", default_value = "1e-2:1e4:log:61")]
    pub nb_grid: Grid,
}

#[derive(Args, Debug, Serialize)]
pub struct CovertArgs {
    #[arg(long, required = true)]
    pub eta: f64,
    #[arg(long = "NB", required = true)]
    pub nb: f64,
    #[arg(long, required = true)]
    pub delta: f64,
    /// Number of modes seen by Eve.
    #[arg(long, required = true)]
    pub n: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Receiver {
    Homodyne,
    Tmsv,
}

#[derive(Args, Debug, Serialize)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value = "homodyne")]
    pub receiver: Receiver,
    #[arg(long, required = true)]
    pub eta: f64,
    #[arg(long = "NS", required = true)]
    pub ns: f64,
    #[arg(long = "NB", required = true)]
    pub nb: f64,
    /// Shots per symbol: value or grid (rounded to integers).
    #[arg(long = "M", required = true)]
    pub m: Grid,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Disable the one-time pad.
    #[arg(long)]
    pub no_pad: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct ScReceiverArgs {
    #[arg(long = "NS", default_value_t = 0.01)]
    pub ns: f64,
    #[arg(long = "NB", default_value = "16")]
    pub nb: Grid,
    #[arg(long, default_value_t = 0.05)]
    pub eta: f64,
    /// Return-mode Fock cutoff.
    #[arg(long, default_value_t = 160)]
    pub cutoff: usize,
    /// Thermal tail mass tolerated beyond the cutoff.
    #[arg(long, default_value_t = 2e-3)]
    pub tail_tol: f64,
    /// τ² in units of N_S/√N_B.
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
    pub tau_factors: Vec<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct LinkArgs {
    #[arg(long, default_value_t = 0.001)]
    pub range_km: f64,
    #[arg(long, default_value_t = 0.01)]
    pub loss_db_per_km: f64,
    #[arg(long, default_value_t = 0.1)]
    pub area_m2: f64,
    #[arg(long, default_value_t = 5.0)]
    pub freq_ghz: f64,
    #[arg(long, default_value_t = 300.0)]
    pub temp_k: f64,
    #[arg(long = "NS", default_value_t = 0.01)]
    pub ns: f64,
    #[arg(long, default_value_t = 1e-2)]
    pub p_err: f64,
    /// Receiver exponent ratio entering M ≈ ratio · N_B/(η²N_S) · ln(1/p).
    #[arg(long, default_value_t = 0.25)]
    pub beta_ratio: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

/// Failure kinds mapped to exit codes.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Failed(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::Domain(_) | Error::DimensionMismatch(_) => CliError::Config(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failed(format!("i/o: {e}"))
    }
}

pub fn run<I: IntoIterator<Item = OsString>>(args: I) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match commands::dispatch(&cli) {
        Ok(code) => code,
        Err(CliError::Config(m)) => {
            eprintln!("configuration error: {m}");
            EXIT_CONFIG
        }
        Err(CliError::Failed(m)) => {
            eprintln!("error: {m}");
            EXIT_FAILED
        }
    }
}
