//! `shearbeam` command-line driver.
//!
//! Failures print a single `Kind: message` line on stderr and exit with
//! 2 (ConfigError), 3 (IoError) or 4 (SolverFailure).

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;
use shearbeam::Error;

use crate::args::{Cli, Command};

/// Error classes surfaced to the shell.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Solver(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Solver(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (kind, msg) = match self {
            CliError::Config(m) => ("ConfigError", m),
            CliError::Io(m) => ("IoError", m),
            CliError::Solver(m) => ("SolverFailure", m),
        };
        // one line, whatever the underlying message contains
        write!(f, "{kind}: {}", msg.replace('\n', " "))
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e.root() {
            Error::SingularSystem { .. } | Error::SolverFailure { .. } => CliError::Solver(msg),
            Error::Io { .. } | Error::Csv { .. } => CliError::Io(msg),
            _ => CliError::Config(msg),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::Convergence(a) => commands::convergence(a),
        Command::Energy(a) => commands::energy(a),
        Command::EtaCheck(a) => commands::eta_check(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
