mod args;
mod commands;
mod manifest;

use std::process::ExitCode;

use clap::Parser;

use chhard_core::io::TensorFileError;
use chhard_core::Error;

/// Bad flag values detected after parsing.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

const EXIT_USAGE: u8 = 2;
const EXIT_DATA: u8 = 3;
const EXIT_INVARIANT: u8 = 4;

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return EXIT_USAGE;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::InvalidArgument(_) | Error::UnknownArray(_) => EXIT_USAGE,
                e if e.is_invariant_violation() => EXIT_INVARIANT,
                _ => EXIT_DATA,
            };
        }
        if let Some(e) = cause.downcast_ref::<TensorFileError>() {
            return match e {
                TensorFileError::InvariantViolation(_) => EXIT_INVARIANT,
                _ => EXIT_DATA,
            };
        }
    }
    EXIT_DATA
}

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let label = match err
                .chain()
                .find_map(|c| c.downcast_ref::<TensorFileError>())
            {
                Some(e) => format!("error[{}]", e.code()),
                None => "error".to_string(),
            };
            eprintln!("{label}: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
