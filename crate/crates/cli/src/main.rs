//! `epicongress`: batch command-line front end.
//!
//! Exit status: 0 on success, 2 for usage errors, then one code per error
//! class: 3 invalid input, 4 violated hypothesis, 5 data or I/O, 6 numerical.

mod args;
mod commands;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use epicongress::{Error, ErrorClass};

use args::{Cli, Command};
use output::{emit, render, RunManifest};

fn exit_code(e: &Error) -> u8 {
    match e.class() {
        ErrorClass::Invalid => 3,
        ErrorClass::Hypothesis => 4,
        ErrorClass::Data => 5,
        ErrorClass::Numerical => 6,
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    let start = Instant::now();
    let common = &cli.common;
    let outcome = match &cli.command {
        Command::Pmf(a) => commands::pmf(a, common),
        Command::OptimalSize(a) => commands::optimal_size(a, common),
        Command::Bounds(a) => commands::bounds(a, common),
        Command::Gain(a) => commands::gain(a, common),
        Command::Experiment(a) => commands::experiment(a, common),
        Command::Regress(a) => commands::regress(a, common),
        Command::Conditions(a) => commands::conditions(a, common),
    }?;
    let bytes = render(&outcome.data, outcome.format)?;
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        subcommand: cli.command.name(),
        seed: outcome.seed,
        format: outcome.format,
        parameters: outcome.parameters,
        duration_secs: start.elapsed().as_secs_f64(),
    };
    emit(&bytes, &manifest, common.output.as_deref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // Help and version exit 0; usage errors exit 2.
        Err(e) => e.exit(),
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
