//! `key=value` config files. Entries become long flags inserted right after
//! the subcommand name, so anything given on the command line (later in
//! argv) overrides them.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{ArgAction, CommandFactory};

use crate::args::Cli;
use crate::error::{CliError, CliResult};

pub fn parse(path: &Path, text: &str) -> CliResult<Vec<(String, String)>> {
    let bad = |line: usize, msg: String| CliError::Config { path: path.to_owned(), msg: format!("line {line}: {msg}") };
    let mut seen = BTreeMap::new();
    let mut entries = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| bad(k + 1, format!("expected key=value, got {line:?}")))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim().to_owned();
        if key.is_empty() {
            return Err(bad(k + 1, "empty key".into()));
        }
        if let Some(prev) = seen.insert(key.clone(), k + 1) {
            return Err(bad(k + 1, format!("duplicate key {key:?} (first on line {prev})")));
        }
        entries.push((key, value));
    }
    Ok(entries)
}

/// Removes `--config FILE` from `argv` and splices the file's entries in as flags.
pub fn expand(mut argv: Vec<String>) -> CliResult<Vec<String>> {
    let Some(pos) = argv.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(argv);
    };
    let path = match argv[pos].strip_prefix("--config=") {
        Some(p) => {
            let p = PathBuf::from(p);
            argv.remove(pos);
            p
        }
        None => {
            if pos + 1 >= argv.len() {
                return Err(CliError::Usage("--config needs a file argument".into()));
            }
            let p = PathBuf::from(argv.remove(pos + 1));
            argv.remove(pos);
            p
        }
    };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    let entries = parse(&path, &text)?;

    let cmd = Cli::command();
    let Some((at, sub)) =
        argv.iter().enumerate().skip(1).find_map(|(i, a)| cmd.find_subcommand(a).map(|s| (i, s.clone())))
    else {
        // no subcommand: let clap report it
        return Ok(argv);
    };
    let mut flags = Vec::new();
    for (key, value) in entries {
        let arg =
            sub.get_arguments().find(|a| a.get_long() == Some(key.as_str()) && key != "config").ok_or_else(|| {
                CliError::Config { path: path.clone(), msg: format!("unknown key {key:?} for `{}`", sub.get_name()) }
            })?;
        match arg.get_action() {
            ArgAction::SetTrue | ArgAction::SetFalse => match value.as_str() {
                "true" => flags.push(format!("--{key}")),
                "false" => {}
                _ => {
                    return Err(CliError::Config { path: path.clone(), msg: format!("{key} expects true or false") });
                }
            },
            _ => flags.push(format!("--{key}={value}")),
        }
    }
    argv.splice(at + 1..at + 1, flags);
    Ok(argv)
}
