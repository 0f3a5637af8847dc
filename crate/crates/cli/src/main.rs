//! `wavelet-prep`: batch preprocessing, verification, statistics and
//! benchmarks for the LeGall 5/3 subband pipeline.
//!
//! Exit codes: 0 success, 1 fatal, 2 some files failed, 64 usage.

mod args;
mod commands;
mod output;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use output::Output;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FATAL: u8 = 1;
pub const EXIT_PARTIAL: u8 = 2;
pub const EXIT_USAGE: u8 = 64;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::from(EXIT_OK),
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let stdout = io::stdout().lock();
    let result = match cli.command {
        Command::Pipeline(a) => {
            let mut out = Output::new(stdout, a.format);
            commands::pipeline::run(&a, &mut out)
        }
        Command::Verify(a) => {
            let mut out = Output::new(stdout, a.format);
            commands::verify::run(&a, &mut out)
        }
        Command::Stats(a) => {
            let mut out = Output::new(stdout, a.format);
            commands::stats::run(&a, &mut out)
        }
        Command::Bench(a) => {
            let mut out = Output::new(stdout, a.format);
            commands::bench::run(&a, &mut out)
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let _ = writeln!(io::stderr(), "wavelet-prep: {e}");
            ExitCode::from(EXIT_FATAL)
        }
    }
}
