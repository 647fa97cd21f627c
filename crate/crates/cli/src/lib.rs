//! Config-driven experiment runner: `backflow <command> --config <path> --out <dir>`.

// `!(x > 0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

pub use config::RunConfig;
pub use error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Spectrum,
    SweepSmearing,
    Gaussian,
    AnalyticState,
    Measure,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::SweepSmearing => "sweep-smearing",
            Command::Gaussian => "gaussian",
            Command::AnalyticState => "analytic-state",
            Command::Measure => "measure",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "backflow", version, about = "Quantum backflow experiments")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// TOML run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("backflow: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(args: &Args) -> Result<(), CliError> {
    let cfg = RunConfig::load(&args.config)?;
    if cfg.command() != args.command.name() {
        return Err(error::config_err(format!(
            "config is for `{}` but `{}` was requested",
            cfg.command(),
            args.command.name()
        )));
    }
    commands::run(&cfg, &args.out)
}
