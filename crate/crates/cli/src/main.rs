//! `lops`: analyze `.lops` systems, verify the ENS reference instance,
//! sample characteristic cones and run the tensor lab.
//!
//! Exit codes: 0 when every check passes, 1 on a failed check, 2 on input
//! errors (bad flags, unreadable or unparsable files).

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("LO_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| format!("LO_THREADS must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match commands::run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
