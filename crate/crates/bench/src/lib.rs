//! Shared fixtures for the benchmark suite.

use sbnednn_core::{
    apply_standardizer, fit_standardizer, synthesize_dataset, Matrix, ScoreDataset, SynthSpec,
};

/// Long-tail dataset small enough for a per-iteration benchmark loop.
pub fn long_tail_small(n: usize, seed: u64) -> ScoreDataset {
    let mut spec = SynthSpec::long_tail(seed);
    spec.n = n;
    spec.d = 16;
    spec.noise = 4.0;
    synthesize_dataset(&spec).unwrap()
}

/// Standardized features plus label indices, ready for the training loop.
pub fn standardized_training_data(ds: &ScoreDataset) -> (Matrix, Vec<usize>) {
    let standardizer = fit_standardizer(ds).unwrap();
    let features = apply_standardizer(&standardizer, ds).unwrap();
    (features, ds.label_indices())
}
