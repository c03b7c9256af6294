//! `scattime`: scattering time observables from the command line.

mod commands;
mod output;

use std::fmt;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{
    ArrivalArgs, DelayScanArgs, EnergyScanArgs, OneDimArgs, PhaseShiftsArgs, WkbArgs,
};

#[derive(Debug, Parser)]
#[command(name = "scattime", version, about = "Scattering time delays, space shifts and arrival times")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Hard-sphere phase shifts and their energy derivatives.
    PhaseShifts(PhaseShiftsArgs),
    /// Time delay, space shift and cross section versus angle.
    DelayScan(DelayScanArgs),
    /// Time delay and space shift versus energy at fixed angle.
    EnergyScan(EnergyScanArgs),
    /// One-dimensional reflection and transmission delays.
    Oned(OneDimArgs),
    /// Arrival-time density of a Gaussian packet at a distant detector.
    Arrival(ArrivalArgs),
    /// Stationary-phase delay and space shift against the partial-wave result.
    Wkb(WkbArgs),
}

/// Invalid argument combination detected after parsing.
#[derive(Debug)]
pub struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<Usage>() || cause.is::<std::io::Error>() {
            return EXIT_USAGE;
        }
        if let Some(e) = cause.downcast_ref::<scattime::Error>() {
            return match e {
                scattime::Error::Domain(_) => EXIT_USAGE,
                _ => EXIT_NUMERICAL,
            };
        }
    }
    EXIT_NUMERICAL
}

/// A closed downstream pipe (`scattime ... | head`) is not a failure.
fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.chain().any(|c| {
        c.downcast_ref::<std::io::Error>()
            .is_some_and(|e| e.kind() == std::io::ErrorKind::BrokenPipe)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::PhaseShifts(a) => commands::phase_shifts(a),
        Command::DelayScan(a) => commands::delay_scan(a),
        Command::EnergyScan(a) => commands::energy_scan_cmd(a),
        Command::Oned(a) => commands::oned(a),
        Command::Arrival(a) => commands::arrival(a),
        Command::Wkb(a) => commands::wkb(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
