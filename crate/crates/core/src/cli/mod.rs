//! Command-line front end: argument parsing, settings resolution, sweeps and output.

mod args;
mod commands;
mod settings;
mod table;

use std::fs::File;
use std::io::{BufWriter, Write};

pub use args::{
    Cli, Command, CommonArgs, Format, Integration, Model, QPolicy, SweepArgs, SweepVariable,
    TuneArgs,
};
pub use commands::{
    antenna_sweep, correlations, outage_sweep, policy_q, simulate, tune_q_table, Output,
};
pub use settings::{
    antenna_grid, db_to_linear, parse_grid, threshold_linear, ConfigFile, Settings,
};
pub use table::{write_table, Cell, Table};

use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_INSUFFICIENT_DATA: i32 = 4;

const DEFAULT_THRESHOLD_GRID: &str = "-10:10:2";
const DEFAULT_ANTENNA_GRID: &str = "1:8:1";
const DEFAULT_INTENSITY_GRID: &str = "1e-5,2e-5,5e-5,1e-4,2e-4,5e-4,1e-3";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("{failed} of {total} rows failed; see the status column")]
    RowsFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Model(Error::Domain(_) | Error::Argument(_)) => EXIT_USAGE,
            CliError::Model(Error::InsufficientData { .. }) => EXIT_INSUFFICIENT_DATA,
            CliError::Model(_) | CliError::RowsFailed { .. } => EXIT_NUMERICAL,
            CliError::Io(_) => EXIT_USAGE,
        }
    }
}

fn grid_or(text: Option<&str>, default: &str) -> Result<Vec<f64>, CliError> {
    parse_grid(text.unwrap_or(default))
}

/// Runs `command` and returns its output without writing it.
pub fn execute(command: &Command) -> Result<(Settings, Output), CliError> {
    match command {
        Command::OutageSweep(a) => {
            let s = Settings::resolve(&a.common)?;
            let grid = grid_or(a.grid.as_deref(), DEFAULT_THRESHOLD_GRID)?;
            let out = outage_sweep(&s, &grid, !a.no_mc)?;
            Ok((s, out))
        }
        Command::AntennaSweep(a) => {
            let s = Settings::resolve(&a.common)?;
            let grid = antenna_grid(&grid_or(a.grid.as_deref(), DEFAULT_ANTENNA_GRID)?)?;
            let out = antenna_sweep(&s, &grid, !a.no_mc)?;
            Ok((s, out))
        }
        Command::TuneQ(a) => {
            let s = Settings::resolve(&a.common)?;
            let out = match a.sweep {
                None if a.grid.is_some() => {
                    return Err(CliError::Usage("--grid needs --sweep".into()));
                }
                None => tune_q_table(&s, None)?,
                Some(var) => {
                    let default = match var {
                        SweepVariable::Antennas => "2:8:1",
                        SweepVariable::ThresholdDb => DEFAULT_THRESHOLD_GRID,
                        SweepVariable::Intensity => DEFAULT_INTENSITY_GRID,
                    };
                    let grid = grid_or(a.grid.as_deref(), default)?;
                    tune_q_table(&s, Some((var, &grid)))?
                }
            };
            Ok((s, out))
        }
        Command::Correlations(a) => {
            let s = Settings::resolve(a)?;
            let out = correlations(&s)?;
            Ok((s, out))
        }
        Command::Simulate(a) => {
            let s = Settings::resolve(a)?;
            let out = simulate(&s)?;
            Ok((s, out))
        }
    }
}

/// Runs `cli` and writes the table to `--out` or stdout.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let (settings, output) = execute(&cli.command)?;
    match &settings.out {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            write_table(&mut w, settings.format, &output.header, &output.table)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            write_table(&mut w, settings.format, &output.header, &output.table)?;
            w.flush()?;
        }
    }
    if output.failed_rows > 0 {
        return Err(CliError::RowsFailed {
            failed: output.failed_rows,
            total: output.table.rows.len(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), EXIT_USAGE);
        assert_eq!(
            CliError::Model(Error::Domain("x".into())).exit_code(),
            EXIT_USAGE
        );
        assert_eq!(
            CliError::Model(Error::NoBracket { f0: 1.0, f1: 1.0 }).exit_code(),
            EXIT_NUMERICAL
        );
        assert_eq!(
            CliError::Model(Error::Integration {
                achieved: 1e-3,
                requested: 1e-6
            })
            .exit_code(),
            EXIT_NUMERICAL
        );
        assert_eq!(
            CliError::Model(Error::InsufficientData {
                valid: 1,
                required: 2
            })
            .exit_code(),
            EXIT_INSUFFICIENT_DATA
        );
    }

    #[test]
    fn parses_negative_thresholds_and_lists() {
        let cli = Cli::try_parse_from([
            "mrc-outage",
            "outage-sweep",
            "--threshold-db",
            "-5",
            "--grid",
            "-10:0:5",
            "--q-squared",
            "0.76,0.9",
        ])
        .unwrap();
        let Command::OutageSweep(a) = cli.command else {
            panic!("wrong subcommand")
        };
        assert_eq!(a.common.threshold_db, Some(-5.0));
        assert_eq!(a.grid.as_deref(), Some("-10:0:5"));
        assert_eq!(a.common.q_squared, Some(vec![0.76, 0.9]));
        assert!(Cli::try_parse_from([
            "mrc-outage",
            "simulate",
            "--q",
            "0.5",
            "--q-squared",
            "0.25"
        ])
        .is_err());
        assert!(Cli::try_parse_from([
            "mrc-outage",
            "simulate",
            "--intensity",
            "1e-3",
            "--p",
            "0.5"
        ])
        .is_err());
        assert!(Cli::try_parse_from(["mrc-outage", "frobnicate"]).is_err());
    }
}
