//! `--config` files: `key=value` lines whose keys are long option names.
//! Values from the file fill in options not given on the command line.

use std::ffi::OsString;
use std::path::Path;

use clap::parser::ValueSource;
use clap::{ArgMatches, CommandFactory};
use dmdscan::{Error, Result};

use crate::args::Cli;

const GLOBAL_KEYS: [&str; 2] = ["seed", "out"];

pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (k, v) = content.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: format!("expected key=value, found '{content}'"),
        })?;
        let key = k.trim().trim_start_matches("--");
        if key.is_empty() {
            return Err(Error::Parse {
                line: i + 1,
                message: "empty key".into(),
            });
        }
        out.push((key.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Appends `--key=value` for every config entry the user did not set explicitly.
pub fn apply_config(argv: &[OsString], matches: &ArgMatches, path: &Path) -> Result<Vec<OsString>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let entries = parse_config(&text)?;
    let (name, sub_matches) = matches
        .subcommand()
        .ok_or_else(|| Error::Parameter("no command given".into()))?;
    let root = Cli::command();
    let sub = root
        .find_subcommand(name)
        .ok_or_else(|| Error::Parameter(format!("unknown command '{name}'")))?;

    let mut argv = argv.to_vec();
    for (key, value) in entries {
        let explicit = if GLOBAL_KEYS.contains(&key.as_str()) {
            matches.value_source(&key) == Some(ValueSource::CommandLine)
        } else {
            let arg = sub
                .get_arguments()
                .find(|a| a.get_long() == Some(key.as_str()))
                .ok_or_else(|| Error::Parameter(format!("config key '{key}' is not an option of '{name}'")))?;
            sub_matches.value_source(arg.get_id().as_str()) == Some(ValueSource::CommandLine)
        };
        if !explicit {
            argv.push(format!("--{key}={value}").into());
        }
    }
    Ok(argv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_spacing() {
        let kv = parse_config("# header\n fps = 30 \n\n--slit-width=2 # trailing\n").unwrap();
        assert_eq!(
            kv,
            vec![("fps".into(), "30".into()), ("slit-width".into(), "2".into())]
        );
    }

    #[test]
    fn rejects_lines_without_equals() {
        assert!(matches!(parse_config("fps 30\n"), Err(Error::Parse { line: 1, .. })));
    }
}
