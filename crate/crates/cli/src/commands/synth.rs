//! `synth`: generate a synthetic learner-record CSV.

use std::path::PathBuf;

use clap::Args;
use sbnednn_core::{synthesize_dataset, write_csv, Error, Result, SynthSpec};
use serde_json::json;

use crate::manifest;

#[derive(Args)]
pub struct SynthArgs {
    /// Generator spec JSON {n, d, class_proportions, noise, seed}; the
    /// default is the built-in long-tail profile.
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Output CSV path.
    #[arg(long)]
    pub output: PathBuf,

    /// Overrides the spec's seed when given.
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn run(args: &SynthArgs) -> Result<i32> {
    let mut spec = match &args.input {
        Some(path) => {
            let contents = std::fs::read_to_string(path).map_err(|e| Error::File {
                path: path.display().to_string(),
                source: e,
            })?;
            serde_json::from_str::<SynthSpec>(&contents)
                .map_err(|e| Error::Schema(format!("bad synth spec: {e}")))?
        }
        None => SynthSpec::long_tail(0),
    };
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }

    let dataset = synthesize_dataset(&spec)?;
    write_csv(&dataset, &args.output)?;

    manifest::write(
        &manifest::manifest_path_for(&args.output),
        "synth",
        spec.seed,
        json!({
            "input": args.input.as_ref().map(|p| p.display().to_string()),
            "output": args.output.display().to_string(),
            "spec": spec,
        }),
        json!({ "dataset_csv": args.output.display().to_string() }),
    )?;

    let summary = json!({
        "rows": dataset.n_rows(),
        "features": dataset.n_features(),
        "class_counts": dataset.class_counts(),
    });
    println!("{}", serde_json::to_string_pretty(&summary).expect("valid json"));
    Ok(0)
}
