mod args;
mod commands;
mod config;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, FromArgMatches};
use dmdscan::{Error, ErrorClass};

use args::Cli;

const EXIT_IO: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_ALGORITHM: u8 = 4;

fn exit_code(e: &Error) -> u8 {
    match e.class() {
        ErrorClass::Io => EXIT_IO,
        ErrorClass::Validation => EXIT_VALIDATION,
        ErrorClass::Algorithm => EXIT_ALGORITHM,
    }
}

fn parse(argv: &[OsString]) -> Result<Cli, clap::Error> {
    let matches = Cli::command().try_get_matches_from(argv)?;
    Cli::from_arg_matches(&matches)
}

fn main() -> ExitCode {
    let argv: Vec<OsString> = std::env::args_os().collect();
    let clap_failure = |e: clap::Error| {
        let _ = e.print();
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
            _ => ExitCode::from(EXIT_VALIDATION),
        }
    };
    let cli = match parse(&argv) {
        Ok(c) => c,
        Err(e) => return clap_failure(e),
    };
    let cli = match &cli.config {
        None => cli,
        Some(path) => {
            let matches = Cli::command().get_matches_from(&argv);
            let merged = match config::apply_config(&argv, &matches, path) {
                Ok(a) => a,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(exit_code(&e));
                }
            };
            match parse(&merged) {
                Ok(c) => c,
                Err(e) => return clap_failure(e),
            }
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
