//! Z-test gated resampling loop.
//!
//! Each iteration diagnoses the current grade distribution, then applies two
//! sampling actions chosen by the signs of skewness and kurtosis:
//!
//! - `S < 0`: oversample the lower tier, else oversample the upper tier;
//! - `K > 0`: undersample the medium tier, else oversample the medium tier.
//!
//! Oversampling duplicates existing rows with replacement; undersampling
//! removes uniformly chosen rows, never below a floor count. The loop stops
//! when the Z test passes or an iteration cap is reached; non-convergence is
//! reported, not thrown.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Level, ScoreDataset};
use crate::error::{Error, Result};
use crate::rng::stage_rng;
use crate::stats::{diagnose, DiagnosticsConfig, DistributionDiagnostics};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Lower,
    Medium,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingKind {
    Oversample,
    Undersample,
}

/// Partition of the ordered class labels into contiguous thirds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TierAssignment<T> {
    pub lower: Vec<T>,
    pub medium: Vec<T>,
    pub upper: Vec<T>,
}

impl<T> TierAssignment<T> {
    pub fn classes(&self, tier: Tier) -> &[T] {
        match tier {
            Tier::Lower => &self.lower,
            Tier::Medium => &self.medium,
            Tier::Upper => &self.upper,
        }
    }
}

impl TierAssignment<Level> {
    /// The six grade levels: lower {L1, L2}, medium {L3, L4}, upper {L5, L6}.
    pub fn for_levels() -> Self {
        assign_tiers(&Level::ALL).expect("six levels always split")
    }
}

/// Split ordered labels into contiguous thirds; any remainder goes to the
/// earlier tiers.
pub fn assign_tiers<T: Clone>(ordered: &[T]) -> Result<TierAssignment<T>> {
    let n = ordered.len();
    if n < 3 {
        return Err(Error::TooFewClasses { got: n });
    }
    let base = n / 3;
    let rem = n % 3;
    let lower_len = base + usize::from(rem > 0);
    let medium_len = base + usize::from(rem > 1);
    Ok(TierAssignment {
        lower: ordered[..lower_len].to_vec(),
        medium: ordered[lower_len..lower_len + medium_len].to_vec(),
        upper: ordered[lower_len + medium_len..].to_vec(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingAction {
    pub tier: Tier,
    pub kind: SamplingKind,
    pub step_fraction: f64,
}

/// The two actions chosen from one diagnostics snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub actions: Vec<SamplingAction>,
    pub source_diagnostics: DistributionDiagnostics,
}

/// Branch on the signs of S and K. Comparisons are strict: `S = 0` falls to
/// the upper-tier branch and `K = 0` to the medium oversample branch.
pub fn plan_step(diag: &DistributionDiagnostics, step_fraction: f64) -> SamplingPlan {
    let s_action = SamplingAction {
        tier: if diag.skewness < 0.0 {
            Tier::Lower
        } else {
            Tier::Upper
        },
        kind: SamplingKind::Oversample,
        step_fraction,
    };
    let k_action = SamplingAction {
        tier: Tier::Medium,
        kind: if diag.kurtosis > 0.0 {
            SamplingKind::Undersample
        } else {
            SamplingKind::Oversample
        },
        step_fraction,
    };
    SamplingPlan {
        actions: vec![s_action, k_action],
        source_diagnostics: diag.clone(),
    }
}

/// A resampled dataset plus non-fatal warnings (skipped empty classes,
/// classes pinned at the floor).
#[derive(Debug, Clone)]
pub struct Resampled {
    pub dataset: ScoreDataset,
    pub warnings: Vec<String>,
}

fn check_step(step_fraction: f64) -> Result<()> {
    if !(step_fraction > 0.0 && step_fraction <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "step_fraction must lie in (0, 1], got {step_fraction}"
        )));
    }
    Ok(())
}

/// Append `ceil(step_fraction * count)` duplicates, drawn with replacement,
/// to each targeted class. Appended rows are exact copies of existing rows.
pub fn oversample(
    ds: &ScoreDataset,
    classes: &[Level],
    step_fraction: f64,
    seed: u64,
) -> Result<Resampled> {
    check_step(step_fraction)?;
    let mut rng = stage_rng(seed, "oversample");
    let mut indices: Vec<usize> = (0..ds.n_rows()).collect();
    let mut warnings = Vec::new();
    for &level in classes {
        let members = ds.indices_of(level);
        if members.is_empty() {
            warnings.push(format!("oversample skipped empty class {level}"));
            continue;
        }
        let extra = (step_fraction * members.len() as f64).ceil() as usize;
        for _ in 0..extra {
            indices.push(members[rng.random_range(0..members.len())]);
        }
    }
    Ok(Resampled {
        dataset: ds.select_rows(&indices),
        warnings,
    })
}

/// Remove `floor(step_fraction * count)` uniformly chosen rows from each
/// targeted class, never dropping a class below `floor` rows.
pub fn undersample(
    ds: &ScoreDataset,
    classes: &[Level],
    step_fraction: f64,
    floor: usize,
    seed: u64,
) -> Result<Resampled> {
    check_step(step_fraction)?;
    let mut rng = stage_rng(seed, "undersample");
    let mut keep = vec![true; ds.n_rows()];
    let mut warnings = Vec::new();
    for &level in classes {
        let mut members = ds.indices_of(level);
        if members.is_empty() {
            warnings.push(format!("undersample skipped empty class {level}"));
            continue;
        }
        let count = members.len();
        if count <= floor {
            warnings.push(format!(
                "undersample left class {level} unchanged at floor ({count} rows)"
            ));
            continue;
        }
        let requested = (step_fraction * count as f64).floor() as usize;
        let removable = requested.min(count - floor);
        members.shuffle(&mut rng);
        for &idx in members.iter().take(removable) {
            keep[idx] = false;
        }
    }
    let kept: Vec<usize> = (0..ds.n_rows()).filter(|&i| keep[i]).collect();
    Ok(Resampled {
        dataset: ds.select_rows(&kept),
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalanceConfig {
    pub diagnostics: DiagnosticsConfig,
    pub step_fraction: f64,
    pub max_iterations: usize,
    pub floor: usize,
    pub seed: u64,
}

impl BalanceConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            diagnostics: DiagnosticsConfig::default(),
            step_fraction: 0.1,
            max_iterations: 100,
            floor: 5,
            seed,
        }
    }
}

/// One loop iteration: the diagnostics snapshot, the plan derived from it,
/// and the class counts of the dataset the snapshot was taken on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub diagnostics: DistributionDiagnostics,
    pub plan: SamplingPlan,
    pub class_counts: BTreeMap<Level, usize>,
}

#[derive(Debug, Clone)]
pub struct BalanceResult {
    pub balanced: ScoreDataset,
    pub iterations: usize,
    pub trace: Vec<TraceEntry>,
    pub converged: bool,
    pub warnings: Vec<String>,
}

/// Flat export row for the trace JSON artifact.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub skewness: f64,
    pub kurtosis: f64,
    pub max_score: f64,
    pub z: f64,
    pub actions: Vec<SamplingAction>,
    pub class_counts: BTreeMap<Level, usize>,
}

impl BalanceResult {
    pub fn trace_records(&self) -> Vec<TraceRecord> {
        self.trace
            .iter()
            .enumerate()
            .map(|(iteration, entry)| TraceRecord {
                iteration,
                skewness: entry.diagnostics.skewness,
                kurtosis: entry.diagnostics.kurtosis,
                max_score: entry.diagnostics.max_score,
                z: entry.diagnostics.z_statistic,
                actions: entry.plan.actions.clone(),
                class_counts: entry.class_counts.clone(),
            })
            .collect()
    }
}

/// Repeat diagnose -> plan -> sample until the Z test passes or the
/// iteration cap is hit. Diagnostics are recomputed each iteration on the
/// current dataset's raw grade vector. The input dataset is never mutated.
pub fn balance(ds: &ScoreDataset, config: &BalanceConfig) -> Result<BalanceResult> {
    check_step(config.step_fraction)?;
    let tiers = TierAssignment::for_levels();
    let mut current = ds.clone();
    let mut trace = Vec::new();
    let mut warnings = Vec::new();
    let mut converged = false;

    loop {
        let diag = diagnose(current.grades(), &config.diagnostics)?;
        if diag.passes {
            converged = true;
            break;
        }
        if trace.len() >= config.max_iterations {
            break;
        }
        let iteration = trace.len();
        let plan = plan_step(&diag, config.step_fraction);
        trace.push(TraceEntry {
            diagnostics: diag,
            plan: plan.clone(),
            class_counts: current.class_counts(),
        });
        for (idx, action) in plan.actions.iter().enumerate() {
            let seed = crate::rng::derive_seed(config.seed, &format!("balance:{iteration}:{idx}"));
            let classes = tiers.classes(action.tier);
            let resampled = match action.kind {
                SamplingKind::Oversample => {
                    oversample(&current, classes, action.step_fraction, seed)?
                }
                SamplingKind::Undersample => undersample(
                    &current,
                    classes,
                    action.step_fraction,
                    config.floor,
                    seed,
                )?,
            };
            current = resampled.dataset;
            warnings.extend(resampled.warnings);
        }
    }

    Ok(BalanceResult {
        balanced: current,
        iterations: trace.len(),
        trace,
        converged,
        warnings,
    })
}
