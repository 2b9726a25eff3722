//! Command-line front end for `sasaki-core`.
//!
//! [`run_command`] parses an argument list, runs the library operation and
//! returns the exit code with the text to print: a JSON
//! [`envelope::ResultEnvelope`] on success, a JSON error report otherwise.
//!
//! Exit codes: 0 success, 1 usage, 2 validation, 3 mathematical error,
//! 4 i/o failure.

pub mod args;
pub mod census;
pub mod commands;
pub mod envelope;
pub mod error;
pub mod output;

use clap::error::ErrorKind;
use clap::Parser;

pub use error::{CliError, CliResult};

/// `argv` includes the program name, as in [`std::env::args`].
pub fn run_command<I, S>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match args::Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => (0, e.to_string()),
                _ => {
                    let err = CliError::Usage(e.to_string().trim_end().to_string());
                    (err.exit_code(), err.to_json())
                }
            };
        }
    };
    match commands::execute(&cli.command, argv.get(1..).unwrap_or_default()) {
        Ok(env) => (0, env.to_json()),
        Err(e) => (e.exit_code(), e.to_json()),
    }
}
