//! `boostlab`: run, verify and compare smooth boosters.

mod compare;
mod config;
mod failure;
mod output;
mod run;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "boostlab", version, about = "Lazy-projected smooth boosting with simulated quantum subroutines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train one booster and write its per-iteration log
    Run(run::RunCmd),
    /// Randomized checks of identities, projections, estimators and bounds
    Verify(verify::VerifyCmd),
    /// Run several configurations on the same data and tabulate their costs
    Compare(compare::CompareCmd),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Run(cmd) => run::execute(cmd),
        Command::Verify(cmd) => verify::execute(cmd),
        Command::Compare(cmd) => compare::execute(cmd),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("boostlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
