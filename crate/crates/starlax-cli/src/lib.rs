//! Command-line front end: expression parser, command dispatch and the
//! text/LaTeX/JSON emitters. Results go to stdout, diagnostics to stderr;
//! exit codes are 0 (success), 1 (parse/usage) and 2 (domain errors).

pub mod commands;
pub mod parser;

pub use commands::{run, Cli, Command, OutputFormat};
pub use parser::{parse_diffpoly, parse_qop, parse_symbol, CliError};

/// Runs the CLI for an argument vector; used by the binary and the tests.
pub fn run_args<I, T>(args: I) -> Result<String, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser as _;
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Parse(e.to_string()))?;
    run(cli)
}
