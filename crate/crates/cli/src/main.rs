use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod output;

use config::ParamArgs;

/// Exact spectrum and Rabi dynamics of a cavity coupled to a trapped emitter.
///
/// Energies on the command line (`--emin`, `--emax`) and in output tables are
/// absolute, in units of the coupling g; times are in units of 1/g.
#[derive(Debug, Parser)]
#[command(name = "vibron-qed", version)]
struct Cli {
    #[command(flatten)]
    params: ParamArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct SectorArg {
    /// Excitation sector (photon number m+1 on the ground-state branch)
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub m: i64,
}

#[derive(Debug, Args, Clone)]
pub struct OutArg {
    /// Output directory
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print SI and dimensionless constants
    Params,
    /// Tabulate the G-function on an energy window
    Gscan(commands::GscanArgs),
    /// Lowest roots of the G-function, checked against diagonalization
    Spectrum(commands::SpectrumArgs),
    /// Population dynamics, its Fourier spectrum and peaks
    Dynamics(commands::DynamicsArgs),
    /// Closed-form dressed-state quantities
    Analytic(commands::AnalyticArgs),
    /// Run the cross-validation suite
    Validate(commands::ValidateArgs),
}

fn run(cli: Cli) -> Result<bool> {
    let resolved = cli.params.resolve()?;
    match cli.command {
        Command::Params => commands::params(&resolved),
        Command::Gscan(a) => commands::gscan(&resolved, &a),
        Command::Spectrum(a) => commands::spectrum(&resolved, &a),
        Command::Dynamics(a) => commands::dynamics(&resolved, &a),
        Command::Analytic(a) => commands::analytic(&resolved, &a),
        Command::Validate(a) => commands::validate(&resolved, &a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
