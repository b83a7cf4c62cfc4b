use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod config;
mod error;

use args::{Cli, Command};
use config::Config;
use error::CliResult;

fn run(cli: &Cli) -> CliResult<()> {
    let cfg = Config::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Pam(c) => commands::pam(c, &cfg),
        Command::Synth(a) => commands::synth(a, &cfg),
        Command::Simulate(a) => commands::simulate(a, &cfg),
        Command::VerifyTables(a) => commands::verify(a),
        Command::Crossover(a) => commands::crossover(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pamflow: {e}");
            e.exit_code()
        }
    }
}
