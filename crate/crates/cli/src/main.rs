use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use skewmask_cli::app::{run, Cli};
use skewmask_cli::CliError;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let err = CliError::Config(e.to_string().lines().next().unwrap_or("").to_string());
            eprint!("{e}");
            eprintln!("{}", err.one_line());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.one_line());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
