//! Learner-record datasets: grade binning, train/test splitting, feature
//! standardization, CSV exchange, and a seeded synthetic generator.

mod csv_io;
mod synth;

pub use csv_io::{load_csv, write_csv, CsvLoad};
pub use synth::{synthesize_dataset, SynthSpec, DEFAULT_CLASS_PROPORTIONS, DEFAULT_NOISE};

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::stage_rng;

/// Grade levels, the six class labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level {
    L1,
    L2,
    L3,
    L4,
    L5,
    L6,
}

impl Level {
    pub const ALL: [Level; 6] = [
        Level::L1,
        Level::L2,
        Level::L3,
        Level::L4,
        Level::L5,
        Level::L6,
    ];

    pub const COUNT: usize = 6;

    pub fn index(self) -> usize {
        match self {
            Level::L1 => 0,
            Level::L2 => 1,
            Level::L3 => 2,
            Level::L4 => 3,
            Level::L5 => 4,
            Level::L6 => 5,
        }
    }

    pub fn from_index(index: usize) -> Result<Level> {
        Level::ALL
            .get(index)
            .copied()
            .ok_or(Error::LabelOutOfRange {
                label: index,
                num_classes: Level::COUNT,
            })
    }

    /// Half-open `[lo, hi)` grade bounds of this level's bin. The closing 100
    /// itself also belongs to L6.
    pub fn bin_bounds(self) -> (f64, f64) {
        match self {
            Level::L1 => (0.0, 70.0),
            Level::L2 => (70.0, 80.0),
            Level::L3 => (80.0, 90.0),
            Level::L4 => (90.0, 93.0),
            Level::L5 => (93.0, 95.0),
            Level::L6 => (95.0, 100.0),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}", self.index() + 1)
    }
}

/// Map a grade in `[0, 100]` to its level.
///
/// Bins are half-open (`[0,70) -> L1`, ..., `[93,95) -> L5`) with the final
/// bin closed: `[95,100] -> L6`. Boundary grades belong to the upper bin.
pub fn bin_grade(grade: f64) -> Result<Level> {
    if !grade.is_finite() || !(0.0..=100.0).contains(&grade) {
        return Err(Error::OutOfRange { value: grade });
    }
    let level = if grade < 70.0 {
        Level::L1
    } else if grade < 80.0 {
        Level::L2
    } else if grade < 90.0 {
        Level::L3
    } else if grade < 93.0 {
        Level::L4
    } else if grade < 95.0 {
        Level::L5
    } else {
        Level::L6
    };
    Ok(level)
}

/// Feature group tags from the dataset schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeatureCategory {
    AudioVideo,
    ChapterTest,
    Discussion,
    Unknown,
}

impl FeatureCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            FeatureCategory::AudioVideo => "AudioVideo",
            FeatureCategory::ChapterTest => "ChapterTest",
            FeatureCategory::Discussion => "Discussion",
            FeatureCategory::Unknown => "Unknown",
        }
    }

    /// Lenient parse: anything unrecognized maps to `Unknown`.
    pub fn parse(tag: &str) -> FeatureCategory {
        match tag {
            "AudioVideo" => FeatureCategory::AudioVideo,
            "ChapterTest" => FeatureCategory::ChapterTest,
            "Discussion" => FeatureCategory::Discussion,
            _ => FeatureCategory::Unknown,
        }
    }
}

/// Immutable feature matrix plus grades and derived levels.
///
/// Construction validates every invariant: feature values and grades lie in
/// `[0, 100]`, there are no missing values, and `levels[i]` always equals
/// `bin_grade(grades[i])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreDataset {
    features: Matrix,
    grades: Vec<f64>,
    levels: Vec<Level>,
    feature_names: Vec<String>,
    categories: Vec<FeatureCategory>,
}

impl ScoreDataset {
    pub fn new(
        features: Matrix,
        grades: Vec<f64>,
        feature_names: Vec<String>,
        categories: Vec<FeatureCategory>,
    ) -> Result<Self> {
        if features.rows() != grades.len() {
            return Err(Error::DimensionMismatch {
                expected: features.rows(),
                got: grades.len(),
            });
        }
        if feature_names.len() != features.cols() {
            return Err(Error::DimensionMismatch {
                expected: features.cols(),
                got: feature_names.len(),
            });
        }
        if categories.len() != features.cols() {
            return Err(Error::DimensionMismatch {
                expected: features.cols(),
                got: categories.len(),
            });
        }
        for r in 0..features.rows() {
            for (c, &x) in features.row(r).iter().enumerate() {
                if !x.is_finite() || !(0.0..=100.0).contains(&x) {
                    return Err(Error::Schema(format!(
                        "feature value {x} at row {r}, column {c} outside [0, 100]"
                    )));
                }
            }
        }
        let levels = grades.iter().map(|&g| bin_grade(g)).collect::<Result<_>>()?;
        Ok(Self {
            features,
            grades,
            levels,
            feature_names,
            categories,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.grades.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.grades.is_empty()
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn grades(&self) -> &[f64] {
        &self.grades
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn categories(&self) -> &[FeatureCategory] {
        &self.categories
    }

    /// Labels as class indices 0..6, the form the classifier consumes.
    pub fn label_indices(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.index()).collect()
    }

    /// Rows per level, including levels with zero rows.
    pub fn class_counts(&self) -> BTreeMap<Level, usize> {
        let mut counts: BTreeMap<Level, usize> = Level::ALL.iter().map(|&l| (l, 0)).collect();
        for level in &self.levels {
            *counts.get_mut(level).expect("all levels present") += 1;
        }
        counts
    }

    /// Indices of the rows labelled `level`, in row order.
    pub fn indices_of(&self, level: Level) -> Vec<usize> {
        self.levels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == level)
            .map(|(i, _)| i)
            .collect()
    }

    /// Gather rows by index; duplicates allowed, order preserved.
    pub fn select_rows(&self, indices: &[usize]) -> ScoreDataset {
        ScoreDataset {
            features: self.features.select_rows(indices),
            grades: indices.iter().map(|&i| self.grades[i]).collect(),
            levels: indices.iter().map(|&i| self.levels[i]).collect(),
            feature_names: self.feature_names.clone(),
            categories: self.categories.clone(),
        }
    }
}

/// Outcome of a seeded 70/30-style split.
#[derive(Debug, Clone)]
pub struct SplitDataset {
    pub train: ScoreDataset,
    pub test: ScoreDataset,
    pub split_seed: u64,
    /// Non-fatal anomalies, e.g. an empty test partition after rounding.
    pub warnings: Vec<String>,
}

/// Seeded uniform shuffle, then prefix/suffix split at `round(n * ratio)`.
pub fn split(ds: &ScoreDataset, ratio: f64, seed: u64) -> Result<SplitDataset> {
    split_with_options(ds, ratio, seed, false)
}

/// Split with optional per-class stratification.
pub fn split_with_options(
    ds: &ScoreDataset,
    ratio: f64,
    seed: u64,
    stratified: bool,
) -> Result<SplitDataset> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "split ratio must lie in (0, 1), got {ratio}"
        )));
    }

    let mut rng = stage_rng(seed, "split");
    let (mut train_idx, mut test_idx) = (Vec::new(), Vec::new());
    if stratified {
        for level in Level::ALL {
            let mut members = ds.indices_of(level);
            members.shuffle(&mut rng);
            let take = ((members.len() as f64) * ratio).round() as usize;
            let take = take.min(members.len());
            train_idx.extend_from_slice(&members[..take]);
            test_idx.extend_from_slice(&members[take..]);
        }
        train_idx.shuffle(&mut rng);
        test_idx.shuffle(&mut rng);
    } else {
        let mut indices: Vec<usize> = (0..ds.n_rows()).collect();
        indices.shuffle(&mut rng);
        let take = (((ds.n_rows() as f64) * ratio).round() as usize).min(ds.n_rows());
        train_idx = indices[..take].to_vec();
        test_idx = indices[take..].to_vec();
    }

    let mut warnings = Vec::new();
    if train_idx.is_empty() {
        warnings.push("train partition is empty after rounding".to_string());
    }
    if test_idx.is_empty() {
        warnings.push("test partition is empty after rounding".to_string());
    }

    Ok(SplitDataset {
        train: ds.select_rows(&train_idx),
        test: ds.select_rows(&test_idx),
        split_seed: seed,
        warnings,
    })
}

/// Per-feature centering and scaling, fitted on training rows only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    mean: Vec<f64>,
    std: Vec<f64>,
    zero_variance: Vec<bool>,
}

impl Standardizer {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn std(&self) -> &[f64] {
        &self.std
    }

    /// Columns flagged as constant on the fitting set; they standardize to 0.
    pub fn zero_variance(&self) -> &[bool] {
        &self.zero_variance
    }

    /// `(x - mean) / std` per feature; flagged columns map to 0.
    pub fn transform(&self, features: &Matrix) -> Result<Matrix> {
        if features.cols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: features.cols(),
            });
        }
        let mut out = features.clone();
        for r in 0..out.rows() {
            for (c, value) in out.row_mut(r).iter_mut().enumerate() {
                *value = if self.zero_variance[c] {
                    0.0
                } else {
                    (*value - self.mean[c]) / self.std[c]
                };
            }
        }
        Ok(out)
    }
}

/// Fit per-feature mean and population standard deviation on `train`.
pub fn fit_standardizer(train: &ScoreDataset) -> Result<Standardizer> {
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = train.n_rows() as f64;
    let d = train.n_features();
    let mut mean = vec![0.0; d];
    for r in 0..train.n_rows() {
        for (m, &x) in mean.iter_mut().zip(train.features().row(r)) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut var = vec![0.0; d];
    for r in 0..train.n_rows() {
        for (c, &x) in train.features().row(r).iter().enumerate() {
            let delta = x - mean[c];
            var[c] += delta * delta;
        }
    }
    let mut std = vec![0.0; d];
    let mut zero_variance = vec![false; d];
    for c in 0..d {
        var[c] /= n;
        if var[c] > 0.0 {
            std[c] = var[c].sqrt();
        } else {
            zero_variance[c] = true;
        }
    }
    Ok(Standardizer {
        mean,
        std,
        zero_variance,
    })
}

/// Apply a fitted standardizer to a dataset's feature matrix.
pub fn apply_standardizer(s: &Standardizer, ds: &ScoreDataset) -> Result<Matrix> {
    s.transform(ds.features())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_dataset(grades: &[f64]) -> ScoreDataset {
        let features = Matrix::from_rows(
            &grades
                .iter()
                .enumerate()
                .map(|(i, _)| vec![i as f64, 100.0 - i as f64])
                .collect::<Vec<_>>(),
        );
        ScoreDataset::new(
            features,
            grades.to_vec(),
            vec!["a".into(), "b".into()],
            vec![FeatureCategory::Unknown; 2],
        )
        .unwrap()
    }

    #[test]
    fn bin_grade_boundaries() {
        assert_eq!(bin_grade(0.0).unwrap(), Level::L1);
        assert_eq!(bin_grade(69.999).unwrap(), Level::L1);
        assert_eq!(bin_grade(70.0).unwrap(), Level::L2);
        assert_eq!(bin_grade(80.0).unwrap(), Level::L3);
        assert_eq!(bin_grade(90.0).unwrap(), Level::L4);
        assert_eq!(bin_grade(93.0).unwrap(), Level::L5);
        assert_eq!(bin_grade(95.0).unwrap(), Level::L6);
        assert_eq!(bin_grade(100.0).unwrap(), Level::L6);
        assert!(matches!(
            bin_grade(-0.001),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            bin_grade(100.001),
            Err(Error::OutOfRange { .. })
        ));
        assert!(bin_grade(f64::NAN).is_err());
    }

    #[test]
    fn bin_grade_matches_interval_table_for_all_integer_grades() {
        // Half-open convention, enumerated exhaustively.
        for g in 0..=100u32 {
            let g = f64::from(g);
            let expected = Level::ALL
                .iter()
                .copied()
                .find(|level| {
                    let (lo, hi) = level.bin_bounds();
                    (g >= lo && g < hi) || (*level == Level::L6 && g == 100.0)
                })
                .unwrap();
            assert_eq!(bin_grade(g).unwrap(), expected, "grade {g}");
        }
    }

    #[test]
    fn levels_follow_grades() {
        let ds = tiny_dataset(&[65.0, 75.0, 85.0, 91.0, 94.0, 99.0]);
        assert_eq!(
            ds.levels(),
            &[Level::L1, Level::L2, Level::L3, Level::L4, Level::L5, Level::L6]
        );
    }

    #[test]
    fn dataset_rejects_out_of_range_features() {
        let features = Matrix::from_rows(&[vec![101.0]]);
        let err = ScoreDataset::new(
            features,
            vec![50.0],
            vec!["a".into()],
            vec![FeatureCategory::Unknown],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Schema(_)));
    }

    #[test]
    fn split_cardinality_and_partition() {
        let ds = tiny_dataset(&[10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 72.0, 81.0, 91.0, 96.0]);
        let split = split(&ds, 0.7, 42).unwrap();
        assert_eq!(split.train.n_rows(), 7);
        assert_eq!(split.test.n_rows(), 3);

        let mut all: Vec<f64> = split
            .train
            .grades()
            .iter()
            .chain(split.test.grades())
            .copied()
            .collect();
        all.sort_by(f64::total_cmp);
        let mut orig = ds.grades().to_vec();
        orig.sort_by(f64::total_cmp);
        assert_eq!(all, orig);
    }

    #[test]
    fn split_is_deterministic() {
        let ds = tiny_dataset(&[10.0, 20.0, 30.0, 40.0, 50.0, 96.0]);
        let a = split(&ds, 0.7, 1).unwrap();
        let b = split(&ds, 0.7, 1).unwrap();
        assert_eq!(a.train.grades(), b.train.grades());
        assert_eq!(a.test.grades(), b.test.grades());
    }

    #[test]
    fn split_single_row_warns() {
        let ds = tiny_dataset(&[88.0]);
        let split = split(&ds, 0.7, 0).unwrap();
        assert_eq!(split.train.n_rows(), 1);
        assert_eq!(split.test.n_rows(), 0);
        assert!(!split.warnings.is_empty());
    }

    #[test]
    fn split_rejects_bad_inputs() {
        let ds = tiny_dataset(&[88.0, 90.0]);
        assert!(matches!(
            split(&ds, 1.0, 0),
            Err(Error::InvalidConfig(_))
        ));
        let empty = ds.select_rows(&[]);
        assert!(matches!(split(&empty, 0.7, 0), Err(Error::EmptyDataset)));
    }

    #[test]
    fn stratified_split_keeps_per_class_ratio() {
        let mut grades = Vec::new();
        grades.extend(std::iter::repeat_n(50.0, 20)); // L1
        grades.extend(std::iter::repeat_n(97.0, 40)); // L6
        let ds = tiny_dataset(&grades);
        let split = split_with_options(&ds, 0.7, 9, true).unwrap();
        let train_counts = split.train.class_counts();
        assert_eq!(train_counts[&Level::L1], 14);
        assert_eq!(train_counts[&Level::L6], 28);
    }

    #[test]
    fn standardizer_two_point_feature() {
        let features = Matrix::from_rows(&[vec![0.0], vec![100.0]]);
        let ds = ScoreDataset::new(
            features,
            vec![50.0, 60.0],
            vec!["a".into()],
            vec![FeatureCategory::Unknown],
        )
        .unwrap();
        let s = fit_standardizer(&ds).unwrap();
        assert_eq!(s.mean(), &[50.0]);
        assert_eq!(s.std(), &[50.0]);
        assert_eq!(s.zero_variance(), &[false]);
    }

    #[test]
    fn standardizer_flags_constant_feature() {
        let features = Matrix::from_rows(&[vec![5.0, 1.0], vec![5.0, 3.0]]);
        let ds = ScoreDataset::new(
            features,
            vec![50.0, 60.0],
            vec!["a".into(), "b".into()],
            vec![FeatureCategory::Unknown; 2],
        )
        .unwrap();
        let s = fit_standardizer(&ds).unwrap();
        assert_eq!(s.zero_variance(), &[true, false]);
        let out = apply_standardizer(&s, &ds).unwrap();
        assert_eq!(out.get(0, 0), 0.0);
        assert_eq!(out.get(1, 0), 0.0);
    }

    #[test]
    fn standardized_training_features_have_zero_mean_unit_std() {
        let grades = vec![50.0, 60.0, 75.0, 85.0, 96.0];
        let ds = tiny_dataset(&grades);
        let s = fit_standardizer(&ds).unwrap();
        let out = apply_standardizer(&s, &ds).unwrap();
        for c in 0..out.cols() {
            let n = out.rows() as f64;
            let mean: f64 = (0..out.rows()).map(|r| out.get(r, c)).sum::<f64>() / n;
            let var: f64 = (0..out.rows())
                .map(|r| (out.get(r, c) - mean).powi(2))
                .sum::<f64>()
                / n;
            assert!(mean.abs() < 1e-9);
            assert!((var.sqrt() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn identity_standardizer_passes_through() {
        let s = Standardizer {
            mean: vec![0.0, 0.0],
            std: vec![1.0, 1.0],
            zero_variance: vec![false, false],
        };
        let m = Matrix::from_rows(&[vec![7.0, 9.0]]);
        assert_eq!(s.transform(&m).unwrap(), m);
    }

    #[test]
    fn standardizer_dimension_mismatch() {
        let ds = tiny_dataset(&[50.0, 60.0]);
        let s = fit_standardizer(&ds).unwrap();
        let wrong = Matrix::from_rows(&[vec![1.0, 2.0, 3.0]]);
        assert!(matches!(
            s.transform(&wrong),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn fit_matches_direct_summation_oracle() {
        let rows = vec![vec![3.0, 50.0], vec![40.0, 60.0], vec![83.0, 10.0]];
        let ds = ScoreDataset::new(
            Matrix::from_rows(&rows),
            vec![50.0, 60.0, 70.0],
            vec!["a".into(), "b".into()],
            vec![FeatureCategory::Unknown; 2],
        )
        .unwrap();
        let s = fit_standardizer(&ds).unwrap();
        for c in 0..2 {
            let vals: Vec<f64> = rows.iter().map(|r| r[c]).collect();
            let mean = vals.iter().sum::<f64>() / 3.0;
            let std =
                (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 3.0).sqrt();
            assert!((s.mean()[c] - mean).abs() < 1e-12);
            assert!((s.std()[c] - std).abs() < 1e-12);
        }
    }
}
