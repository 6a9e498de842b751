//! Imbalance-aware grade-level prediction.
//!
//! The pipeline has three stages: diagnose class imbalance in a grade
//! distribution via moment statistics and a Z test ([`stats`]), rebalance the
//! dataset with a sign-guided over/under-sampling loop ([`resample`]), then
//! train and evaluate a dense classifier with embedded batch normalization
//! ([`nn`], [`eval`]). [`dataset`] supplies loading, binning, splitting,
//! standardization, and a seeded synthetic generator.
//!
//! Everything is deterministic given a seed; see [`rng`] for the fan-out
//! scheme.

pub mod dataset;
pub mod error;
pub mod eval;
pub mod matrix;
pub mod nn;
pub mod resample;
pub mod rng;
pub mod stats;

pub use dataset::{
    apply_standardizer, bin_grade, fit_standardizer, load_csv, split, split_with_options,
    synthesize_dataset, write_csv, CsvLoad, FeatureCategory, Level, ScoreDataset, SplitDataset,
    Standardizer, SynthSpec,
};
pub use error::{Error, Result};
pub use eval::{ablation_table, evaluate, AblationTable, EvaluationReport};
pub use matrix::Matrix;
pub use nn::{
    make_layout, predict, train, AdamState, BatchNormLayer, DenseLayer, LayerDesc, LayoutKind,
    Network, NetworkSpec, TrainConfig, TrainedModel,
};
pub use resample::{
    assign_tiers, balance, oversample, plan_step, undersample, BalanceConfig, BalanceResult,
    Resampled, SamplingAction, SamplingKind, SamplingPlan, Tier, TierAssignment, TraceEntry,
};
pub use stats::{
    diagnose, kurtosis, max_score, passes_gaussian_test, skewness, z_statistic,
    DiagnosticsConfig, DistributionDiagnostics,
};
