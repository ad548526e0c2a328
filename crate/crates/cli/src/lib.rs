//! Command-line frontend for lamelab: argument parsing, command bodies,
//! output rendering and the checked-in reference tables.

pub mod args;
pub mod commands;
pub mod golden;
pub mod render;

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use commands::{CliError, EXIT_OK, EXIT_USAGE};
use render::render;

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome { code: EXIT_OK, stdout: text, stderr: String::new() },
                _ => Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: text },
            };
        }
    };
    let result = match cli.command {
        Command::Triples { order } => commands::cmd_triples(order),
        Command::Bad { order, prime, pmax } => commands::cmd_bad(order, prime, pmax),
        Command::Solve { order, prime, b, zeta_index, precision } => commands::cmd_solve(order, prime, b, zeta_index, precision),
        Command::Table { min, max } => commands::cmd_table(min, max),
        Command::Verify { order, prime, precision } => commands::cmd_verify(order, prime, precision),
        Command::Series { kind, terms } => commands::cmd_series(kind, terms),
    };
    match result {
        Ok((report, code)) => {
            let (stdout, stderr) = render(&report, cli.format);
            Outcome { code, stdout, stderr }
        }
        Err(CliError { code, message }) => Outcome { code, stdout: String::new(), stderr: format!("error: {message}\n") },
    }
}
