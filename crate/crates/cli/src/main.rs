mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;
use rankup::bench::BenchParams;
use rankup::Error;

use args::{Cli, Command};
use commands::Outcome;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::NonFinite { .. } | Error::Io(_) | Error::Tolerance { .. } => 2,
        Error::Convergence { .. } => 4,
        Error::Shape { .. }
        | Error::Length { .. }
        | Error::Singular { .. }
        | Error::Hypothesis(_)
        | Error::Precondition(_)
        | Error::SingularUpdate(_) => 3,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let opts = &cli.global;
    let result = match &cli.command {
        Command::Update { a, x1, g, x2 } => commands::update(opts, a, x1, g, x2.as_deref()),
        Command::Verify { omega, candidate } => commands::verify(opts, omega, candidate),
        Command::Regress { csv, no_fit } => commands::regress(opts, csv, *no_fit),
        Command::Bench {
            size,
            rank,
            k,
            trials,
            seed,
        } => commands::bench(
            opts,
            BenchParams {
                ell: *size,
                rank: *rank,
                k: *k,
                trials: *trials,
                seed: *seed,
            },
        ),
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::VerifyFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
