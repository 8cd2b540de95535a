//! `monoform`: command-line front end for the `monoform-core` toolkit.
//!
//! Reports go to stdout as JSON (`schema_version` 1); sweeps write CSV.
//! Exit codes: 0 success, 2 domain or usage error, 3 numerical failure,
//! 4 I/O error, 5 malformed input.

mod args;
mod commands;
mod config;
mod error;
mod json;
mod sweep;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use error::{CliError, CliResult};

/// Caps the rayon worker count.
const THREADS_VAR: &str = "MONOFORM_THREADS";

fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_VAR} must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("{THREADS_VAR}: {e}")))
}

fn run() -> CliResult<()> {
    let argv: Vec<String> = std::env::args_os()
        .map(|a| a.into_string().map_err(|a| CliError::Usage(format!("argument is not UTF-8: {a:?}"))))
        .collect::<CliResult<_>>()?;
    let cli = Cli::parse_from(config::expand(argv)?);
    configure_threads()?;
    commands::run(cli.command, std::io::stdout().lock())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("monoform: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
