use std::process::ExitCode;

use clap::Parser;
use crowdrate_cli::args::Cli;
use crowdrate_cli::config;

fn main() -> ExitCode {
    let raw: Vec<_> = std::env::args_os().collect();
    let expanded = match config::expand_args(raw) {
        Ok(args) => args,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let cli = Cli::try_parse_from(&expanded).unwrap_or_else(|e| e.exit());
    let arguments: Vec<String> = expanded
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match crowdrate_cli::run(&cli, &arguments) {
        Ok(status) => ExitCode::from(status.exit_code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
