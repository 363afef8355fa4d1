use clap::Parser as _;

use starlax_cli::{commands, CliError};

fn main() {
    let cli = match commands::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are success paths; everything else is usage
            use clap::error::ErrorKind;
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    std::process::exit(0);
                }
                _ => {
                    eprint!("{e}");
                    std::process::exit(1);
                }
            }
        }
    };
    match commands::run(cli) {
        Ok(output) => {
            println!("{output}");
            std::process::exit(0);
        }
        Err(err @ CliError::Parse(_)) => {
            eprintln!("{err}");
            std::process::exit(1);
        }
        Err(err @ CliError::Domain(_)) => {
            eprintln!("{err}");
            std::process::exit(2);
        }
    }
}
