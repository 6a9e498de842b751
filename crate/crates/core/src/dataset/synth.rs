//! Seeded synthetic learner-record generator.
//!
//! Stands in for private SPOC datasets. Each class gets a fixed prototype
//! feature vector; rows are the prototype plus Gaussian noise, clamped to
//! `[0, 100]`, with the grade drawn uniformly inside the class's bin. With
//! `noise = 0` the classes are exactly separable; the default long-tail
//! profile is dominated by L6 with L4 rarest.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::stage_rng;

use super::{FeatureCategory, Level, ScoreDataset};

/// Default class proportions: L6 dominant, L4 rarest.
pub const DEFAULT_CLASS_PROPORTIONS: [f64; 6] = [0.08, 0.07, 0.10, 0.03, 0.12, 0.60];

/// Default per-feature Gaussian noise scale (grade points).
pub const DEFAULT_NOISE: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n: usize,
    pub d: usize,
    pub class_proportions: Vec<f64>,
    pub noise: f64,
    pub seed: u64,
}

impl SynthSpec {
    /// The default imbalanced profile: 10,000 rows, 69 features, moderate noise.
    pub fn long_tail(seed: u64) -> Self {
        Self {
            n: 10_000,
            d: 69,
            class_proportions: DEFAULT_CLASS_PROPORTIONS.to_vec(),
            noise: DEFAULT_NOISE,
            seed,
        }
    }

    /// Noise-free profile: exactly separable by construction.
    pub fn separable(n: usize, seed: u64) -> Self {
        Self {
            n,
            d: 69,
            class_proportions: DEFAULT_CLASS_PROPORTIONS.to_vec(),
            noise: 0.0,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 6 {
            return Err(Error::InvalidSpec(format!("n must be >= 6, got {}", self.n)));
        }
        if self.d == 0 {
            return Err(Error::InvalidSpec("d must be >= 1".into()));
        }
        if self.class_proportions.len() != Level::COUNT {
            return Err(Error::InvalidSpec(format!(
                "class_proportions must have {} entries, got {}",
                Level::COUNT,
                self.class_proportions.len()
            )));
        }
        if self
            .class_proportions
            .iter()
            .any(|&p| !p.is_finite() || p < 0.0)
        {
            return Err(Error::InvalidSpec(
                "class proportions must be finite and nonnegative".into(),
            ));
        }
        let sum: f64 = self.class_proportions.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidSpec(format!(
                "class proportions must sum to 1, got {sum}"
            )));
        }
        if !self.noise.is_finite() || self.noise < 0.0 {
            return Err(Error::InvalidSpec(format!(
                "noise must be finite and nonnegative, got {}",
                self.noise
            )));
        }
        Ok(())
    }
}

/// Feature schema for `d` columns; the 69-column case mirrors the SPOC
/// feature groups (60 audio/video, 8 chapter tests, 1 discussion).
fn feature_schema(d: usize) -> (Vec<String>, Vec<FeatureCategory>) {
    if d == 69 {
        let mut names = Vec::with_capacity(d);
        let mut categories = Vec::with_capacity(d);
        for i in 1..=60 {
            names.push(format!("av_{i:02}"));
            categories.push(FeatureCategory::AudioVideo);
        }
        for i in 1..=8 {
            names.push(format!("ct_{i}"));
            categories.push(FeatureCategory::ChapterTest);
        }
        names.push("disc_1".into());
        categories.push(FeatureCategory::Discussion);
        (names, categories)
    } else {
        (
            (1..=d).map(|i| format!("f{i}")).collect(),
            vec![FeatureCategory::Unknown; d],
        )
    }
}

pub fn synthesize_dataset(spec: &SynthSpec) -> Result<ScoreDataset> {
    spec.validate()?;

    let prototypes: Vec<Vec<f64>> = (0..Level::COUNT)
        .map(|k| {
            let mut rng = stage_rng(spec.seed, &format!("synth:prototype:{k}"));
            (0..spec.d).map(|_| rng.random_range(10.0..90.0)).collect()
        })
        .collect();

    let mut cumulative = Vec::with_capacity(Level::COUNT);
    let mut acc = 0.0;
    for &p in &spec.class_proportions {
        acc += p;
        cumulative.push(acc);
    }

    let mut rng = stage_rng(spec.seed, "synth:rows");
    let mut features = Vec::with_capacity(spec.n);
    let mut grades = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let u: f64 = rng.random();
        let class = cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(Level::COUNT - 1);
        let (lo, hi) = Level::ALL[class].bin_bounds();
        grades.push(lo + (hi - lo) * rng.random::<f64>());
        let row: Vec<f64> = prototypes[class]
            .iter()
            .map(|&p| {
                let jitter: f64 = if spec.noise > 0.0 {
                    spec.noise * rng.sample::<f64, _>(StandardNormal)
                } else {
                    0.0
                };
                (p + jitter).clamp(0.0, 100.0)
            })
            .collect();
        features.push(row);
    }

    let (names, categories) = feature_schema(spec.d);
    ScoreDataset::new(Matrix::from_rows(&features), grades, names, categories)
}
