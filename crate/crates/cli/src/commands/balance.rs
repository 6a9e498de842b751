//! `balance`: rebalance a dataset until its grades pass the Z test.
//!
//! Writes the balanced CSV, a per-iteration trace JSON, and a manifest.
//! Exit 0 on convergence, 4 otherwise (artifacts are written either way).

use std::path::PathBuf;

use clap::Args;
use sbnednn_core::{balance, load_csv, write_csv, BalanceConfig, DiagnosticsConfig, Result};
use serde_json::json;

use crate::manifest;

#[derive(Args)]
pub struct BalanceArgs {
    /// Input CSV path.
    #[arg(long)]
    pub input: PathBuf,

    /// Balanced CSV output path; the trace lands at `<output>.trace.json`.
    #[arg(long)]
    pub output: PathBuf,

    /// Base seed for the sampling draws.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long = "sigma-ref", default_value_t = 0.36)]
    pub sigma_ref: f64,

    #[arg(long, default_value_t = 1.96)]
    pub epsilon: f64,

    /// Fraction of each targeted class resampled per action.
    #[arg(long = "step-fraction", default_value_t = 0.1)]
    pub step_fraction: f64,

    #[arg(long = "max-iterations", default_value_t = 100)]
    pub max_iterations: usize,

    /// Minimum rows a class keeps under undersampling.
    #[arg(long, default_value_t = 5)]
    pub floor: usize,
}

pub fn run(args: &BalanceArgs) -> Result<i32> {
    let config = BalanceConfig {
        diagnostics: DiagnosticsConfig::new(args.sigma_ref, args.epsilon)?,
        step_fraction: args.step_fraction,
        max_iterations: args.max_iterations,
        floor: args.floor,
        seed: args.seed,
    };
    let loaded = load_csv(&args.input)?;
    let result = balance(&loaded.dataset, &config)?;

    write_csv(&result.balanced, &args.output)?;
    let trace_path = {
        let mut name = args
            .output
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        name.push_str(".trace.json");
        args.output.with_file_name(name)
    };
    manifest::write_json(
        &trace_path,
        &serde_json::to_value(result.trace_records()).expect("valid json"),
    )?;

    manifest::write(
        &manifest::manifest_path_for(&args.output),
        "balance",
        args.seed,
        json!({
            "input": args.input.display().to_string(),
            "output": args.output.display().to_string(),
            "seed": args.seed,
            "sigma_ref": args.sigma_ref,
            "epsilon": args.epsilon,
            "step_fraction": args.step_fraction,
            "max_iterations": args.max_iterations,
            "floor": args.floor,
            "dropped_rows": loaded.dropped_rows,
        }),
        json!({
            "balanced_csv": args.output.display().to_string(),
            "trace_json": trace_path.display().to_string(),
        }),
    )?;

    let summary = json!({
        "converged": result.converged,
        "iterations": result.iterations,
        "input_rows": loaded.dataset.n_rows(),
        "balanced_rows": result.balanced.n_rows(),
        "class_counts": result.balanced.class_counts(),
        "warnings": result.warnings,
    });
    println!("{}", serde_json::to_string_pretty(&summary).expect("valid json"));

    Ok(if result.converged { 0 } else { 4 })
}
