//! Mini-batch training loop and the trained-model artifact.

use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::dataset::Standardizer;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::{derive_seed, stage_rng};

use super::adam::AdamState;
use super::layout::NetworkSpec;
use super::loss::softmax_cross_entropy;
use super::network::Network;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub epochs: usize,
    pub lr: f64,
    pub seed: u64,
    /// Stop after this many consecutive epochs without a training-loss
    /// improvement; `None` disables early stopping.
    pub patience: Option<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 128,
            epochs: 100,
            lr: 1e-3,
            seed: 0,
            patience: Some(10),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub mean_loss: f64,
    pub train_accuracy: f64,
}

/// A trained network plus everything needed to reproduce and reuse it.
///
/// Serializes to a single JSON document; parameters are stored as flat
/// arrays with shapes, exactly (shortest round-tripping floats).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub format_version: u32,
    pub spec: NetworkSpec,
    pub network: Network,
    pub standardizer: Option<Standardizer>,
    pub training_log: Vec<EpochStats>,
    pub seed: u64,
}

impl TrainedModel {
    pub fn with_standardizer(mut self, standardizer: Standardizer) -> Self {
        self.standardizer = Some(standardizer);
        self
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Schema(format!("model serialization failed: {e}")))?;
        std::fs::write(path, json + "\n").map_err(|e| Error::File {
            path: path.display().to_string(),
            source: e,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let contents = std::fs::read_to_string(path).map_err(|e| Error::File {
            path: path.display().to_string(),
            source: e,
        })?;
        let model: TrainedModel = serde_json::from_str(&contents)
            .map_err(|e| Error::Schema(format!("bad model file: {e}")))?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Schema(format!(
                "unsupported model format_version {}",
                model.format_version
            )));
        }
        Ok(model)
    }

    pub fn training_log_csv(&self) -> String {
        let mut out = String::from("epoch,mean_loss,train_accuracy\n");
        for row in &self.training_log {
            out.push_str(&format!(
                "{},{},{}\n",
                row.epoch, row.mean_loss, row.train_accuracy
            ));
        }
        out
    }

    /// Class indices for each input row, batch-norm in inference mode; ties
    /// break toward the lowest index.
    pub fn predict(&self, features: &Matrix) -> Result<Vec<usize>> {
        let logits = self.network.forward_infer(features)?;
        Ok(argmax_rows(&logits))
    }
}

fn argmax_rows(logits: &Matrix) -> Vec<usize> {
    (0..logits.rows())
        .map(|r| {
            let row = logits.row(r);
            let mut best = 0;
            for (c, &v) in row.iter().enumerate().skip(1) {
                if v > row[best] {
                    best = c;
                }
            }
            best
        })
        .collect()
}

/// Free-function form of [`TrainedModel::predict`].
pub fn predict(model: &TrainedModel, features: &Matrix) -> Result<Vec<usize>> {
    model.predict(features)
}

/// Mini-batch indices for one epoch: a seeded shuffle chunked by
/// `batch_size`. A trailing single-row batch is merged into the previous
/// batch so batch normalization always sees at least two rows.
fn epoch_batches(n: usize, batch_size: usize, seed: u64, epoch: usize) -> Vec<Vec<usize>> {
    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(&mut stage_rng(seed, &format!("shuffle:{epoch}")));
    let mut batches: Vec<Vec<usize>> = indices
        .chunks(batch_size)
        .map(<[usize]>::to_vec)
        .collect();
    if batches.len() >= 2 && batches.last().is_some_and(|b| b.len() == 1) {
        let last = batches.pop().expect("just checked");
        batches.last_mut().expect("len >= 1").extend(last);
    }
    batches
}

/// Train a network on standardized features.
///
/// Each epoch shuffles with a seed derived from `(config.seed, epoch)`, then
/// runs forward (training mode) -> loss -> backward -> Adam per mini-batch.
/// The per-epoch log records mean loss and inference-mode training accuracy.
/// Fully deterministic for a fixed `(data, config)`.
pub fn train(
    spec: &NetworkSpec,
    features: &Matrix,
    labels: &[usize],
    config: &TrainConfig,
) -> Result<TrainedModel> {
    if features.rows() != labels.len() {
        return Err(Error::LengthMismatch {
            left: features.rows(),
            right: labels.len(),
        });
    }
    if features.rows() < 2 {
        return Err(Error::DegenerateInput(format!(
            "need at least 2 training rows, got {}",
            features.rows()
        )));
    }
    if let Some(&bad) = labels.iter().find(|&&l| l >= spec.num_classes) {
        return Err(Error::LabelOutOfRange {
            label: bad,
            num_classes: spec.num_classes,
        });
    }
    if config.batch_size == 0 {
        return Err(Error::InvalidConfig("batch_size must be positive".into()));
    }

    let mut network = Network::init(spec, derive_seed(config.seed, "init"))?;
    let mut adam = AdamState::new(config.lr, &network.tensor_lens());
    let mut training_log = Vec::with_capacity(config.epochs);
    let n = features.rows();

    let mut best_loss = f64::INFINITY;
    let mut stale_epochs = 0usize;

    for epoch in 0..config.epochs {
        let mut loss_sum = 0.0;
        for batch in epoch_batches(n, config.batch_size, config.seed, epoch) {
            let xb = features.select_rows(&batch);
            let yb: Vec<usize> = batch.iter().map(|&i| labels[i]).collect();
            let (logits, cache) = network.forward_train(&xb)?;
            let (loss, dlogits) = softmax_cross_entropy(&logits, &yb)?;
            if !loss.is_finite() {
                return Err(Error::TrainingDiverged { epoch });
            }
            loss_sum += loss * batch.len() as f64;
            let grads = network.backward(&cache, &dlogits)?;
            adam.step(&mut network.tensor_slices_mut(), &grads.tensor_slices())?;
        }
        let mean_loss = loss_sum / n as f64;

        let predictions = argmax_rows(&network.forward_infer(features)?);
        let correct = predictions
            .iter()
            .zip(labels)
            .filter(|(p, l)| p == l)
            .count();
        training_log.push(EpochStats {
            epoch,
            mean_loss,
            train_accuracy: correct as f64 / n as f64,
        });

        if let Some(patience) = config.patience {
            if mean_loss < best_loss {
                best_loss = mean_loss;
                stale_epochs = 0;
            } else {
                stale_epochs += 1;
                if stale_epochs >= patience {
                    break;
                }
            }
        }
    }

    Ok(TrainedModel {
        format_version: MODEL_FORMAT_VERSION,
        spec: spec.clone(),
        network,
        standardizer: None,
        training_log,
        seed: config.seed,
    })
}
