//! `train`: seeded 70/30 split, train-set standardization, training, and a
//! held-out evaluation report.
//!
//! Artifacts: model JSON at `--output`, training log CSV at
//! `<output>.log.csv`, held-out report at `<output>.evaluation.json`, and a
//! manifest. Exit 5 if the loss goes non-finite.

use std::path::{Path, PathBuf};

use clap::Args;
use sbnednn_core::{
    apply_standardizer, evaluate, fit_standardizer, load_csv, make_layout, split_with_options,
    train, Error, Level, LayoutKind, Result, TrainConfig,
};
use serde_json::json;

use crate::manifest;

#[derive(Args)]
pub struct TrainArgs {
    /// Input CSV path.
    #[arg(long)]
    pub input: PathBuf,

    /// Model JSON output path.
    #[arg(long)]
    pub output: PathBuf,

    /// Layout name: structure1|structure2|structure3|sbnednn|depth3..depth7.
    #[arg(long, default_value = "sbnednn")]
    pub layout: String,

    #[arg(long = "hidden-width", default_value_t = 128)]
    pub hidden_width: usize,

    #[arg(long = "batch-size", default_value_t = 128)]
    pub batch_size: usize,

    #[arg(long, default_value_t = 100)]
    pub epochs: usize,

    #[arg(long, default_value_t = 1e-3)]
    pub lr: f64,

    /// Train fraction of the split.
    #[arg(long, default_value_t = 0.7)]
    pub ratio: f64,

    /// Stratify the split by class.
    #[arg(long, default_value_t = false)]
    pub stratified: bool,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn sibling_path(base: &Path, suffix: &str) -> PathBuf {
    let mut name = base
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    name.push_str(suffix);
    base.with_file_name(name)
}

pub fn run(args: &TrainArgs) -> Result<i32> {
    let kind: LayoutKind = args.layout.parse()?;
    let loaded = load_csv(&args.input)?;

    let parts = split_with_options(&loaded.dataset, args.ratio, args.seed, args.stratified)?;
    let standardizer = fit_standardizer(&parts.train)?;
    let train_features = apply_standardizer(&standardizer, &parts.train)?;

    let spec = make_layout(
        kind,
        parts.train.n_features(),
        Level::COUNT,
        args.hidden_width,
    )?;
    let config = TrainConfig {
        batch_size: args.batch_size,
        epochs: args.epochs,
        lr: args.lr,
        seed: args.seed,
        ..TrainConfig::default()
    };
    let model = train(&spec, &train_features, &parts.train.label_indices(), &config)?
        .with_standardizer(standardizer.clone());

    model.save(&args.output)?;
    let log_path = sibling_path(&args.output, ".log.csv");
    std::fs::write(&log_path, model.training_log_csv()).map_err(|e| Error::File {
        path: log_path.display().to_string(),
        source: e,
    })?;

    let mut heldout_report = None;
    let eval_path = sibling_path(&args.output, ".evaluation.json");
    if !parts.test.is_empty() {
        let test_features = apply_standardizer(&standardizer, &parts.test)?;
        let predictions = model
            .predict(&test_features)?
            .into_iter()
            .map(Level::from_index)
            .collect::<Result<Vec<_>>>()?;
        let report = evaluate(&predictions, parts.test.levels())?;
        manifest::write_json(&eval_path, &serde_json::to_value(&report).expect("valid json"))?;
        heldout_report = Some(report);
    }

    manifest::write(
        &manifest::manifest_path_for(&args.output),
        "train",
        args.seed,
        json!({
            "input": args.input.display().to_string(),
            "output": args.output.display().to_string(),
            "layout": args.layout,
            "hidden_width": args.hidden_width,
            "batch_size": args.batch_size,
            "epochs": args.epochs,
            "lr": args.lr,
            "ratio": args.ratio,
            "stratified": args.stratified,
            "seed": args.seed,
            "dropped_rows": loaded.dropped_rows,
            "split_warnings": parts.warnings,
        }),
        json!({
            "model_json": args.output.display().to_string(),
            "training_log_csv": log_path.display().to_string(),
            "heldout_evaluation_json": if heldout_report.is_some() {
                Some(eval_path.display().to_string())
            } else {
                None
            },
        }),
    )?;

    let summary = json!({
        "layout": args.layout,
        "train_rows": parts.train.n_rows(),
        "test_rows": parts.test.n_rows(),
        "epochs_run": model.training_log.len(),
        "final_train_accuracy": model.training_log.last().map(|e| e.train_accuracy),
        "heldout_total_accuracy": heldout_report.as_ref().map(|r| r.total_accuracy),
    });
    println!("{}", serde_json::to_string_pretty(&summary).expect("valid json"));
    Ok(0)
}
