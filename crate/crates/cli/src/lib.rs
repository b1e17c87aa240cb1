//! Command-line front end for `crowdrate`.
//!
//! Every subcommand renders its whole output as text first; the caller then
//! prints it or writes it to `--out` together with a [`RunManifest`] that
//! `crowdrate replay` can check byte for byte.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod manifest;
pub mod parse;

use std::io::Write;

use clap::Parser;

use crate::args::{Cli, Command, Format};
use crate::commands::{Execution, OutputStyle};
pub use crate::error::{CliError, Result};
pub use crate::manifest::RunManifest;

/// How a successful run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    /// `simulate --check` found a point outside the tolerance.
    CheckFailed,
    /// `replay` reproduced different bytes.
    ReplayMismatch,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::CheckFailed | Status::ReplayMismatch => 1,
        }
    }
}

fn style(cli: &Cli, default: Format) -> OutputStyle {
    OutputStyle {
        format: cli.format.unwrap_or(default),
        precision: usize::from(cli.precision),
    }
}

/// Runs any subcommand except `replay`, returning the rendered output.
pub fn execute(cli: &Cli) -> Result<Execution> {
    match &cli.command {
        Command::Bounds(args) => commands::bounds(args, style(cli, Format::Csv)),
        Command::Figure2(args) => commands::figure2(args, style(cli, Format::Csv)),
        Command::Simulate(args) => {
            let plan = commands::plan_simulation(args, cli.seed)?;
            commands::simulate_cmd(&plan, style(cli, Format::Json))
        }
        Command::Validate(args) => commands::validate_cmd(&commands::plan_simulation(args, cli.seed)?),
        Command::Price(args) => commands::price(args, style(cli, Format::Csv)),
        Command::Replay(_) => Err(CliError::config("manifest", "a replay cannot be replayed")),
    }
}

fn write_file(path: &std::path::Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(cli: &Cli, output: &str) -> Result<()> {
    match &cli.out {
        Some(path) => write_file(path, output.as_bytes()),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(output.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

/// Runs a parsed command line. `arguments` is the config-expanded command
/// line without the program name; it is recorded in the manifest.
pub fn run(cli: &Cli, arguments: &[String]) -> Result<Status> {
    if let Command::Replay(args) = &cli.command {
        return replay(cli, &args.manifest);
    }
    let execution = execute(cli)?;
    emit(cli, &execution.output)?;
    if let Some(out) = &cli.out {
        let manifest = RunManifest {
            tool: manifest::TOOL.into(),
            version: manifest::VERSION.into(),
            subcommand: cli.command.name().into(),
            arguments: manifest::strip_output_args(arguments),
            parameters: execution.parameters.clone(),
            seed: cli.seed,
            output_sha256: manifest::sha256_hex(execution.output.as_bytes()),
        };
        manifest.save(&manifest::sibling_path(out))?;
    }
    Ok(if execution.check_failed {
        Status::CheckFailed
    } else {
        Status::Success
    })
}

fn replay(cli: &Cli, path: &std::path::Path) -> Result<Status> {
    let recorded = RunManifest::load(path)?;
    let bad = |message: String| CliError::Manifest {
        path: path.to_path_buf(),
        message,
    };
    if recorded.tool != manifest::TOOL {
        return Err(bad(format!("written by `{}`", recorded.tool)));
    }
    if recorded.version != manifest::VERSION {
        eprintln!(
            "warning: manifest written by version {}, replaying with {}",
            recorded.version,
            manifest::VERSION
        );
    }
    let original = Cli::try_parse_from(
        std::iter::once(manifest::TOOL.to_string()).chain(recorded.arguments.iter().cloned()),
    )
    .map_err(|e| bad(format!("recorded arguments do not parse: {e}")))?;
    if original.command.name() != recorded.subcommand {
        return Err(bad("subcommand does not match the recorded arguments".into()));
    }
    let execution = execute(&original)?;
    let digest = manifest::sha256_hex(execution.output.as_bytes());
    if let Some(out) = &cli.out {
        write_file(out, execution.output.as_bytes())?;
    }
    if digest == recorded.output_sha256 {
        println!("replay ok: {digest}");
        Ok(Status::Success)
    } else {
        eprintln!(
            "replay mismatch: manifest records {}, reproduced {digest}",
            recorded.output_sha256
        );
        Ok(Status::ReplayMismatch)
    }
}
