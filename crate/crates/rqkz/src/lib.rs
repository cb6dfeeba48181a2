//! Command-line front end and file formats for `rqkz-core`: run
//! configuration, the check registry, JSON reports and matrix dumps.

pub mod cache;
pub mod commands;
pub mod config;
pub mod dump;
pub mod error;
pub mod report;
pub mod suite;

pub use config::{Cli, RunConfig};
pub use error::CliError;

use clap::Parser;

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                commands::EXIT_CONFIG
            } else {
                commands::EXIT_PASS
            };
            let _ = e.print();
            return code;
        }
    };
    let result = RunConfig::from_args(&cli.run).and_then(|cfg| commands::dispatch(&cli.command, &cfg));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("rqkz: {e}");
            e.exit_code()
        }
    }
}
