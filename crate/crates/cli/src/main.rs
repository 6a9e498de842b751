//! Batch front door for the grade-prediction pipeline.
//!
//! Subcommands: `synth`, `diagnose`, `balance`, `train`, `evaluate`,
//! `ablate`. Every run is seeded and reproducible; runs that write artifacts
//! also write a manifest echoing the full effective configuration.
//!
//! Exit codes: 0 success; 1 usage, file, or schema errors; 2 degenerate
//! data; 3 diagnosis failed; 4 balance did not converge; 5 training
//! diverged.

mod commands;
mod manifest;

use clap::{Parser, Subcommand};
use sbnednn_core::Error;

#[derive(Parser)]
#[command(name = "sbnednn", version, about = "Imbalance-aware grade-level prediction pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic learner-record CSV.
    Synth(commands::synth::SynthArgs),
    /// Compute distribution diagnostics for a dataset's grades.
    Diagnose(commands::diagnose::DiagnoseArgs),
    /// Rebalance a dataset until its grades pass the Z test.
    Balance(commands::balance::BalanceArgs),
    /// Split, standardize, and train a classifier; report held-out metrics.
    Train(commands::train::TrainArgs),
    /// Evaluate a trained model on a dataset.
    Evaluate(commands::evaluate::EvaluateArgs),
    /// Train and compare layout variants on one shared split and balance.
    Ablate(commands::ablate::AblateArgs),
}

/// Exit code partition for hard errors.
fn exit_code(err: &Error) -> i32 {
    match err {
        Error::DegenerateInput(_)
        | Error::EmptyDataset
        | Error::EmptyInput
        | Error::BatchTooSmall { .. } => 2,
        Error::TrainingDiverged { .. } => 5,
        _ => 1,
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests are successes; everything else is a
            // usage error (exit 1).
            let _ = err.print();
            let code = if err.use_stderr() { 1 } else { 0 };
            std::process::exit(code);
        }
    };

    let outcome = match cli.command {
        Command::Synth(args) => commands::synth::run(&args),
        Command::Diagnose(args) => commands::diagnose::run(&args),
        Command::Balance(args) => commands::balance::run(&args),
        Command::Train(args) => commands::train::run(&args),
        Command::Evaluate(args) => commands::evaluate::run(&args),
        Command::Ablate(args) => commands::ablate::run(&args),
    };

    match outcome {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(exit_code(&err));
        }
    }
}
