//! `sentlin`: encode graphs, train and score the n-gram baseline, and run the
//! ordering-robustness evaluations. Data goes to files or stdout, progress to
//! stderr. Exit codes: 0 success, 1 invalid input or usage, 2 runtime failure.

mod args;
mod commands;
mod evaluate;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use thiserror::Error;

use args::{Cli, Command, EvalCommand};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Input("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::GenData(a) => commands::gen_data(a),
        Command::Encode(a) => commands::encode(a),
        Command::Decode(a) => commands::decode(a),
        Command::Roundtrip(a) => commands::roundtrip(a),
        Command::Enumerate(a) => commands::enumerate(a),
        Command::Train(a) => commands::train(a),
        Command::Score(a) => commands::score(a),
        Command::Generate(a) => commands::generate(a),
        Command::Eval(e) => match e {
            EvalCommand::Lu(a) => evaluate::lu(a),
            EvalCommand::Ece(a) => evaluate::ece(a),
            EvalCommand::Cross(a) => evaluate::cross(a),
            EvalCommand::SelfAssess(a) => evaluate::self_assess(a),
            EvalCommand::KSweep(a) => evaluate::k_sweep(a),
            EvalCommand::StabilityAuc(a) => evaluate::stability_auc(a),
            EvalCommand::Length(a) => evaluate::length(a),
            EvalCommand::Diversity(a) => evaluate::diversity(a),
            EvalCommand::Vun(a) => evaluate::vun(a),
        },
        Command::Sweep(a) => evaluate::sweep(a),
        Command::IngestNll(a) => evaluate::ingest_nll(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
