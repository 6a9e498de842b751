//! `ablate`: train every variant of one comparison on a shared seeded split
//! and balance, then emit the comparison table.
//!
//! Kinds: `bn-layouts` (the four BN placements) and `depths` (3-7 dense
//! layers, BN-embedded). The split is taken first, the training portion is
//! balanced, and all variants share the resulting standardized data; each
//! variant trains with a seed derived from its name. Wall-clock training
//! times go to a separate artifact so the metric tables stay byte-stable.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use sbnednn_core::rng::derive_seed;
use sbnednn_core::{
    ablation_table, apply_standardizer, balance, evaluate, fit_standardizer, load_csv,
    make_layout, split, train, BalanceConfig, DiagnosticsConfig, Error, LayoutKind, Level,
    Result, TrainConfig,
};
use serde_json::json;

use crate::manifest;

#[derive(Args)]
pub struct AblateArgs {
    /// Input CSV path.
    #[arg(long)]
    pub input: PathBuf,

    /// Comparison to run: bn-layouts | depths.
    #[arg(long)]
    pub ablation: String,

    /// Output directory for the table, timings, reports, and manifest.
    #[arg(long)]
    pub output: PathBuf,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long = "hidden-width", default_value_t = 128)]
    pub hidden_width: usize,

    #[arg(long = "batch-size", default_value_t = 128)]
    pub batch_size: usize,

    #[arg(long, default_value_t = 100)]
    pub epochs: usize,

    #[arg(long, default_value_t = 1e-3)]
    pub lr: f64,

    #[arg(long, default_value_t = 0.7)]
    pub ratio: f64,

    #[arg(long = "sigma-ref", default_value_t = 0.36)]
    pub sigma_ref: f64,

    #[arg(long, default_value_t = 1.96)]
    pub epsilon: f64,

    #[arg(long = "step-fraction", default_value_t = 0.1)]
    pub step_fraction: f64,

    #[arg(long = "max-iterations", default_value_t = 100)]
    pub max_iterations: usize,

    #[arg(long, default_value_t = 5)]
    pub floor: usize,
}

fn variants_for(kind: &str) -> Result<Vec<LayoutKind>> {
    match kind {
        "bn-layouts" => Ok(LayoutKind::BN_LAYOUTS.to_vec()),
        "depths" => Ok(LayoutKind::DEPTHS.to_vec()),
        other => Err(Error::InvalidKind(other.to_string())),
    }
}

pub fn run(args: &AblateArgs) -> Result<i32> {
    let variants = variants_for(&args.ablation)?;
    let loaded = load_csv(&args.input)?;

    std::fs::create_dir_all(&args.output).map_err(|e| Error::File {
        path: args.output.display().to_string(),
        source: e,
    })?;

    let parts = split(&loaded.dataset, args.ratio, args.seed)?;
    let balance_config = BalanceConfig {
        diagnostics: DiagnosticsConfig::new(args.sigma_ref, args.epsilon)?,
        step_fraction: args.step_fraction,
        max_iterations: args.max_iterations,
        floor: args.floor,
        seed: args.seed,
    };
    let balanced = balance(&parts.train, &balance_config)?;
    if !balanced.converged {
        eprintln!(
            "warning: balance did not converge within {} iterations; training on the capped result",
            args.max_iterations
        );
    }

    let standardizer = fit_standardizer(&balanced.balanced)?;
    let train_features = apply_standardizer(&standardizer, &balanced.balanced)?;
    let train_labels = balanced.balanced.label_indices();
    let test_features = apply_standardizer(&standardizer, &parts.test)?;

    let mut reports = BTreeMap::new();
    let mut timings = BTreeMap::new();
    for kind in &variants {
        let name = kind.to_string();
        let spec = make_layout(
            *kind,
            balanced.balanced.n_features(),
            Level::COUNT,
            args.hidden_width,
        )?;
        let config = TrainConfig {
            batch_size: args.batch_size,
            epochs: args.epochs,
            lr: args.lr,
            seed: derive_seed(args.seed, &format!("ablate:{name}")),
            ..TrainConfig::default()
        };

        let started = Instant::now();
        let model = train(&spec, &train_features, &train_labels, &config)?;
        let train_seconds = started.elapsed().as_secs_f64();

        let predictions = model
            .predict(&test_features)?
            .into_iter()
            .map(Level::from_index)
            .collect::<Result<Vec<_>>>()?;
        let report = evaluate(&predictions, parts.test.levels())?;

        manifest::write_json(
            &args.output.join(format!("{name}.evaluation.json")),
            &serde_json::to_value(&report).expect("valid json"),
        )?;
        reports.insert(name.clone(), report);
        timings.insert(name, format!("{train_seconds:.3}"));
    }

    let table = ablation_table(&reports);
    let csv_path = args.output.join("ablation.csv");
    let text_path = args.output.join("ablation.txt");
    std::fs::write(&csv_path, table.to_csv()).map_err(|e| Error::File {
        path: csv_path.display().to_string(),
        source: e,
    })?;
    std::fs::write(&text_path, table.to_text()).map_err(|e| Error::File {
        path: text_path.display().to_string(),
        source: e,
    })?;

    let timed = table.clone().with_column("train_seconds", &timings);
    let timings_path = args.output.join("timings.csv");
    std::fs::write(&timings_path, timed.to_csv()).map_err(|e| Error::File {
        path: timings_path.display().to_string(),
        source: e,
    })?;

    manifest::write(
        &args.output.join("manifest.json"),
        "ablate",
        args.seed,
        json!({
            "input": args.input.display().to_string(),
            "ablation": args.ablation,
            "output": args.output.display().to_string(),
            "seed": args.seed,
            "hidden_width": args.hidden_width,
            "batch_size": args.batch_size,
            "epochs": args.epochs,
            "lr": args.lr,
            "ratio": args.ratio,
            "sigma_ref": args.sigma_ref,
            "epsilon": args.epsilon,
            "step_fraction": args.step_fraction,
            "max_iterations": args.max_iterations,
            "floor": args.floor,
            "balance_converged": balanced.converged,
            "balance_iterations": balanced.iterations,
        }),
        json!({
            "ablation_csv": csv_path.display().to_string(),
            "ablation_txt": text_path.display().to_string(),
            "timings_csv": timings_path.display().to_string(),
        }),
    )?;

    print!("{}", timed.to_text());
    Ok(0)
}
