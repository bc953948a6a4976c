use std::process::ExitCode;

use clap::Parser;

use hyperlex_cli::cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    hyperlex_cli::logging::install("info");
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
