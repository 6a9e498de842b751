//! Per-class recall, total accuracy, and comparison tables.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::Level;
use crate::error::{Error, Result};

/// Metrics for one prediction run.
///
/// `per_class_recall` omits classes with zero support (not measured is not
/// zero); `support` lists all six classes explicitly. `total_accuracy` is the
/// support-weighted mean of the per-class recalls, i.e. plain accuracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub per_class_recall: BTreeMap<Level, f64>,
    pub total_accuracy: f64,
    pub confusion: Vec<Vec<usize>>,
    pub support: BTreeMap<Level, usize>,
}

/// Tally predictions against labels. `confusion[true][predicted]` counts
/// pairs; rows sum to the class supports.
pub fn evaluate(predictions: &[Level], labels: &[Level]) -> Result<EvaluationReport> {
    if predictions.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: predictions.len(),
            right: labels.len(),
        });
    }
    if labels.is_empty() {
        return Err(Error::EmptyInput);
    }

    let k = Level::COUNT;
    let mut confusion = vec![vec![0usize; k]; k];
    for (pred, label) in predictions.iter().zip(labels) {
        confusion[label.index()][pred.index()] += 1;
    }

    let mut support = BTreeMap::new();
    let mut per_class_recall = BTreeMap::new();
    let mut correct = 0usize;
    for level in Level::ALL {
        let row = &confusion[level.index()];
        let count: usize = row.iter().sum();
        support.insert(level, count);
        correct += row[level.index()];
        if count > 0 {
            per_class_recall.insert(level, row[level.index()] as f64 / count as f64);
        }
    }

    Ok(EvaluationReport {
        per_class_recall,
        total_accuracy: correct as f64 / labels.len() as f64,
        confusion,
        support,
    })
}

/// A rendered comparison table: run name, per-class recalls, total accuracy.
#[derive(Debug, Clone, PartialEq)]
pub struct AblationTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

const ABSENT: &str = "—";

impl AblationTable {
    /// Append an extra column (e.g. timings), matching rows by run name.
    pub fn with_column(mut self, name: &str, values: &BTreeMap<String, String>) -> Self {
        self.columns.push(name.to_string());
        for row in &mut self.rows {
            let cell = values.get(&row[0]).cloned().unwrap_or_else(|| ABSENT.into());
            row.push(cell);
        }
        self
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Fixed-width text rendering, columns padded to their widest cell.
    pub fn to_text(&self) -> String {
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let render = |cells: &[String]| {
            cells
                .iter()
                .zip(&widths)
                .map(|(cell, w)| format!("{cell:<w$}", w = w))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        let mut out = render(&self.columns);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&render(row));
            out.push('\n');
        }
        out
    }
}

/// Build the comparison table for a set of named runs, ordered by run name.
/// Recalls and accuracies render with four decimals; zero-support classes
/// render as an absent marker.
pub fn ablation_table(reports: &BTreeMap<String, EvaluationReport>) -> AblationTable {
    let mut columns = vec!["run".to_string()];
    for level in Level::ALL {
        columns.push(format!("acc_{}", level.to_string().to_lowercase()));
    }
    columns.push("total_acc".to_string());

    let rows = reports
        .iter()
        .map(|(name, report)| {
            let mut row = vec![name.clone()];
            for level in Level::ALL {
                row.push(match report.per_class_recall.get(&level) {
                    Some(recall) => format!("{recall:.4}"),
                    None => ABSENT.to_string(),
                });
            }
            row.push(format!("{:.4}", report.total_accuracy));
            row
        })
        .collect();

    AblationTable { columns, rows }
}
