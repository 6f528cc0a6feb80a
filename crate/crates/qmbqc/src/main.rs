//! `qmbqc`: command-line front end for the qudit-mbqc library.
//!
//! Exit codes: 0 on success, 1 when `verify` finds the artifacts differ,
//! 2 on any input error (unreadable file, malformed JSON, wrong artifact
//! kind, unsupported gate).

mod args;
mod commands;
mod report;

use std::process::ExitCode;

use clap::Parser;
use thiserror::Error;

use crate::args::{Cli, Cmd};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Library(#[from] qudit_mbqc::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("verification failed: max infidelity {infidelity:.3e} exceeds tolerance {tol:.3e}")]
    VerificationFailed { infidelity: f64, tol: f64 },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::VerificationFailed { .. } => 1,
            _ => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Cmd::Gen(a) => commands::gen(&a),
        Cmd::Convert(a) => commands::convert(&a),
        Cmd::Rewrite(a) => commands::rewrite(&a),
        Cmd::Run(a) => commands::run(&a),
        Cmd::Verify(a) => commands::verify(&a),
        Cmd::Analyze(a) => commands::analyze(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
