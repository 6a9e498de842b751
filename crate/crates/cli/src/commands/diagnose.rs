//! `diagnose`: distribution diagnostics for a dataset's grades.
//!
//! Exit 0 when the Z test passes, 3 when it fails, making the command usable
//! as a machine-readable gate.

use std::path::PathBuf;

use clap::Args;
use sbnednn_core::{diagnose, load_csv, DiagnosticsConfig, Result};
use serde_json::json;

use crate::manifest;

#[derive(Args)]
pub struct DiagnoseArgs {
    /// Input CSV path.
    #[arg(long)]
    pub input: PathBuf,

    /// Also write the diagnostics JSON here (plus a manifest).
    #[arg(long)]
    pub output: Option<PathBuf>,

    /// Reference scale dividing max_score to form Z.
    #[arg(long = "sigma-ref", default_value_t = 0.36)]
    pub sigma_ref: f64,

    /// Z-test threshold; the test passes strictly below it.
    #[arg(long, default_value_t = 1.96)]
    pub epsilon: f64,
}

pub fn run(args: &DiagnoseArgs) -> Result<i32> {
    let config = DiagnosticsConfig::new(args.sigma_ref, args.epsilon)?;
    let loaded = load_csv(&args.input)?;
    let diagnostics = diagnose(loaded.dataset.grades(), &config)?;

    let report = serde_json::to_value(&diagnostics).expect("valid json");
    println!("{}", serde_json::to_string_pretty(&report).expect("valid json"));

    if let Some(output) = &args.output {
        manifest::write_json(output, &report)?;
        manifest::write(
            &manifest::manifest_path_for(output),
            "diagnose",
            0,
            json!({
                "input": args.input.display().to_string(),
                "output": output.display().to_string(),
                "sigma_ref": args.sigma_ref,
                "epsilon": args.epsilon,
                "dropped_rows": loaded.dropped_rows,
            }),
            json!({ "diagnostics_json": output.display().to_string() }),
        )?;
    }

    Ok(if diagnostics.passes { 0 } else { 3 })
}
