//! `gsp`: evaluate, diagnose, fit and optimise GSP choice models from JSON files.

use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod render;

use args::{Cli, Command};

/// Exit status for invalid input or flags.
const EXIT_INPUT: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Eval(a) => commands::eval(a),
        Command::Fit(a) => commands::fit(a),
        Command::Check(a) => commands::check(a),
        Command::Assort(a) => commands::assort(a),
        Command::Examples(a) => commands::examples(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
