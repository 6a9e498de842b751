//! Distribution-shape diagnostics gating the resampling loop.
//!
//! A grade vector is summarized by four dimensionless indicators: skewness,
//! excess kurtosis, their combined magnitude `max_score`, and the Z statistic
//! `max_score / sigma_ref`. The Z statistic is compared against a threshold
//! (default 1.96) to decide whether the distribution is close enough to
//! Gaussian to stop resampling.
//!
//! All moments use the population convention: the variance inside the
//! standard deviation divides by `n`, matching the `1/n` of the outer sums.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reference scale and threshold for the Z test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsConfig {
    /// Scale dividing `max_score` to form the Z statistic.
    pub sigma_ref: f64,
    /// Z-test threshold; the test passes strictly below it.
    pub epsilon: f64,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            sigma_ref: 0.36,
            epsilon: 1.96,
        }
    }
}

impl DiagnosticsConfig {
    pub fn new(sigma_ref: f64, epsilon: f64) -> Result<Self> {
        if !(sigma_ref > 0.0 && sigma_ref.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "sigma_ref must be positive and finite, got {sigma_ref}"
            )));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be positive and finite, got {epsilon}"
            )));
        }
        Ok(Self { sigma_ref, epsilon })
    }
}

/// Shape indicators for one dataset snapshot.
///
/// `passes` records the verdict against the config in effect when the
/// snapshot was taken; [`passes_gaussian_test`] re-evaluates against any
/// config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionDiagnostics {
    pub skewness: f64,
    pub kurtosis: f64,
    pub max_score: f64,
    pub z_statistic: f64,
    pub mean: f64,
    pub std_dev: f64,
    pub n: usize,
    pub passes: bool,
}

impl DistributionDiagnostics {
    /// Build diagnostics from externally supplied shape indicators.
    ///
    /// Used when skewness and kurtosis come from another source than a raw
    /// grade vector (e.g. a published worked example).
    pub fn from_shape(
        skewness: f64,
        kurtosis: f64,
        mean: f64,
        std_dev: f64,
        n: usize,
        config: &DiagnosticsConfig,
    ) -> Result<Self> {
        let ms = max_score(skewness, kurtosis)?;
        let z = z_statistic(ms, config);
        Ok(Self {
            skewness,
            kurtosis,
            max_score: ms,
            z_statistic: z,
            mean,
            std_dev,
            n,
            passes: z < config.epsilon,
        })
    }
}

/// Mean and population standard deviation, rejecting degenerate vectors.
fn mean_and_std(grades: &[f64]) -> Result<(f64, f64)> {
    if grades.len() < 2 {
        return Err(Error::DegenerateInput(format!(
            "need at least 2 values, got {}",
            grades.len()
        )));
    }
    if grades.iter().any(|x| !x.is_finite()) {
        return Err(Error::DegenerateInput(
            "input contains NaN or infinite values".into(),
        ));
    }
    let n = grades.len() as f64;
    let mean = grades.iter().sum::<f64>() / n;
    let var = grades.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let std_dev = var.sqrt();
    if std_dev <= 0.0 {
        return Err(Error::DegenerateInput(
            "all values identical (zero standard deviation)".into(),
        ));
    }
    Ok((mean, std_dev))
}

/// Central moments of order 2..=4 about the mean, each divided by `n`.
fn central_moments(grades: &[f64], mean: f64) -> (f64, f64, f64) {
    let n = grades.len() as f64;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in grades {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    (m2 / n, m3 / n, m4 / n)
}

/// Third standardized moment, `(1/n) * sum(((x - mean) / std)^3)`.
pub fn skewness(grades: &[f64]) -> Result<f64> {
    let (mean, _) = mean_and_std(grades)?;
    let (m2, m3, _) = central_moments(grades, mean);
    Ok(m3 / m2.powf(1.5))
}

/// Fourth standardized moment minus 3 (excess form).
pub fn kurtosis(grades: &[f64]) -> Result<f64> {
    let (mean, _) = mean_and_std(grades)?;
    let (m2, _, m4) = central_moments(grades, mean);
    Ok(m4 / (m2 * m2) - 3.0)
}

/// The combined imbalance indicator `max(|skewness|, |kurtosis|)`.
pub fn max_score(skewness: f64, kurtosis: f64) -> Result<f64> {
    if !skewness.is_finite() || !kurtosis.is_finite() {
        return Err(Error::DegenerateInput(
            "skewness and kurtosis must be finite".into(),
        ));
    }
    Ok(skewness.abs().max(kurtosis.abs()))
}

/// Z statistic of the hypothesis test: `max_score / sigma_ref`.
pub fn z_statistic(max_score: f64, config: &DiagnosticsConfig) -> f64 {
    max_score / config.sigma_ref
}

/// True iff the snapshot passes the Gaussian-likeness test, `Z < epsilon`
/// strictly; ties fail.
pub fn passes_gaussian_test(diag: &DistributionDiagnostics, config: &DiagnosticsConfig) -> bool {
    diag.z_statistic < config.epsilon
}

/// Compute the full diagnostics bundle for a grade vector.
pub fn diagnose(grades: &[f64], config: &DiagnosticsConfig) -> Result<DistributionDiagnostics> {
    let (mean, std_dev) = mean_and_std(grades)?;
    let (m2, m3, m4) = central_moments(grades, mean);
    let s = m3 / m2.powf(1.5);
    let k = m4 / (m2 * m2) - 3.0;
    let ms = max_score(s, k)?;
    let z = z_statistic(ms, config);
    Ok(DistributionDiagnostics {
        skewness: s,
        kurtosis: k,
        max_score: ms,
        z_statistic: z,
        mean,
        std_dev,
        n: grades.len(),
        passes: z < config.epsilon,
    })
}
