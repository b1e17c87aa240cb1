//! Flat `key = value` config files.
//!
//! Keys are the long flag names of the subcommand (`q`, `n-items`,
//! `sweep-grid`, ...). Blank lines and lines starting with `#` are skipped.
//! Boolean flags take `true` or `false`. Flags given on the command line
//! win over values from the file.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};

pub const SUBCOMMANDS: &[&str] = &["bounds", "figure2", "simulate", "price", "validate", "replay"];

pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::config(
                "config",
                format!("line {}: expected key=value", lineno + 1),
            ));
        };
        let key = key.trim().trim_start_matches("--");
        if key.is_empty() {
            return Err(CliError::config("config", format!("line {}: empty key", lineno + 1)));
        }
        out.push((key.to_string(), value.trim().to_string()));
    }
    Ok(out)
}

fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut iter = args.iter();
    while let Some(arg) = iter.next() {
        let s = arg.to_string_lossy();
        if s == "--config" {
            return iter.next().map(PathBuf::from);
        }
        if let Some(path) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(path));
        }
    }
    None
}

fn flag_present(args: &[OsString], key: &str) -> bool {
    let long = format!("--{key}");
    let with_value = format!("--{key}=");
    args.iter().any(|a| {
        let s = a.to_string_lossy();
        s == long || s.starts_with(&with_value)
    })
}

/// Splices the entries of the `--config` file (if any) into `args` right
/// after the subcommand name, skipping keys already given as flags.
pub fn expand_args(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = read(&path)?;
    let entries = parse(&text)?;
    let Some(pos) = args
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()))
    else {
        return Ok(args);
    };
    let mut injected: Vec<OsString> = Vec::new();
    for (key, value) in entries {
        if key == "config" || flag_present(&args, &key) {
            continue;
        }
        match value.as_str() {
            "true" => injected.push(format!("--{key}").into()),
            "false" => {}
            _ => {
                injected.push(format!("--{key}").into());
                injected.push(value.into());
            }
        }
    }
    let mut out = args;
    out.splice(pos + 1..pos + 1, injected);
    Ok(out)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
