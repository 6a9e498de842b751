//! `evaluate`: run a trained model over a dataset and report metrics.

use std::path::PathBuf;

use clap::Args;
use sbnednn_core::{evaluate, load_csv, Error, Level, Result, TrainedModel};
use serde_json::json;

use crate::manifest;

#[derive(Args)]
pub struct EvaluateArgs {
    /// Trained model JSON path.
    #[arg(long)]
    pub model: PathBuf,

    /// Input CSV path.
    #[arg(long)]
    pub input: PathBuf,

    /// Also write the report JSON here (plus a manifest).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn run(args: &EvaluateArgs) -> Result<i32> {
    let model = TrainedModel::load(&args.model)?;
    let loaded = load_csv(&args.input)?;

    let features = match &model.standardizer {
        Some(s) => s.transform(loaded.dataset.features())?,
        None => {
            if loaded.dataset.n_features() != model.spec.input_dim {
                return Err(Error::DimensionMismatch {
                    expected: model.spec.input_dim,
                    got: loaded.dataset.n_features(),
                });
            }
            loaded.dataset.features().clone()
        }
    };
    let predictions = model
        .predict(&features)?
        .into_iter()
        .map(Level::from_index)
        .collect::<Result<Vec<_>>>()?;
    let report = evaluate(&predictions, loaded.dataset.levels())?;

    let report_json = serde_json::to_value(&report).expect("valid json");
    println!("{}", serde_json::to_string_pretty(&report_json).expect("valid json"));

    if let Some(output) = &args.output {
        manifest::write_json(output, &report_json)?;
        manifest::write(
            &manifest::manifest_path_for(output),
            "evaluate",
            model.seed,
            json!({
                "model": args.model.display().to_string(),
                "input": args.input.display().to_string(),
                "output": output.display().to_string(),
                "dropped_rows": loaded.dropped_rows,
            }),
            json!({ "report_json": output.display().to_string() }),
        )?;
    }

    Ok(0)
}
