//! `hardy-lab`: datasets, plots and paradox verification for the
//! n-particle Hardy construction.

mod commands;
mod config;
mod output;
mod svg;

use std::process::ExitCode;

use clap::Parser;
use thiserror::Error;

use config::Cli;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Verification(String),
    #[error("I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Core(#[from] hardy_core::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Core(_) => 1,
            CliError::Verification(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS // --help / --version
            };
        }
    };

    if let Ok(threads) = std::env::var("HARDY_LAB_THREADS") {
        match threads.parse::<usize>() {
            Ok(t) if t >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build_global();
            }
            _ => {
                eprintln!("error: HARDY_LAB_THREADS must be a positive integer, got {threads:?}");
                return ExitCode::from(1);
            }
        }
    }

    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
