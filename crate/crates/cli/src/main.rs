//! `rcgap`: exact spectral gaps, the verification suite and Monte Carlo
//! sampling for random-cluster dynamics.

mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, ExactCommand, SampleCommand};
use error::CliError;

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Exact(ExactCommand::Gap(a)) => commands::exact_gap(a),
        Command::Exact(ExactCommand::Mixing(a)) => commands::exact_mixing(a),
        Command::Verify(a) => commands::verify(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Sample(SampleCommand::Run(a)) => commands::sample_run(a),
        Command::Sample(SampleCommand::CheckRow(a)) => commands::sample_check_row(a),
        Command::Sample(SampleCommand::Tau(a)) => commands::sample_tau(a),
        Command::Dual(a) => commands::dual(a),
        Command::Graph(a) => commands::graph(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rcgap: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
