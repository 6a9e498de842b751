//! Dense, batch-normalization, and sigmoid layers with analytic backward
//! passes.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Fully connected layer; weights are `in x out`, applied as `x * W + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

/// Gradients of a dense layer's parameters.
#[derive(Debug, Clone)]
pub struct DenseGrads {
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

impl DenseLayer {
    /// Xavier initialization: zero-mean Gaussian weights with variance
    /// `2 / (fan_in + fan_out)`, zero biases.
    pub fn xavier(fan_in: usize, fan_out: usize, rng: &mut ChaCha8Rng) -> Self {
        let std = (2.0 / (fan_in + fan_out) as f64).sqrt();
        let dist = Normal::new(0.0, std).expect("finite std");
        let data = (0..fan_in * fan_out).map(|_| rng.sample(dist)).collect();
        Self {
            weights: Matrix::from_vec(fan_in, fan_out, data),
            bias: vec![0.0; fan_out],
        }
    }

    pub fn in_width(&self) -> usize {
        self.weights.rows()
    }

    pub fn out_width(&self) -> usize {
        self.weights.cols()
    }

    pub fn forward(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.in_width() {
            return Err(Error::DimensionMismatch {
                expected: self.in_width(),
                got: x.cols(),
            });
        }
        let mut out = x.matmul(&self.weights);
        out.add_row_bias(&self.bias);
        Ok(out)
    }

    /// Given the cached forward input and the output gradient, produce
    /// parameter gradients and the input gradient.
    pub fn backward(&self, input: &Matrix, grad_out: &Matrix) -> (DenseGrads, Matrix) {
        let d_weights = input.transpose_matmul(grad_out);
        let d_bias = grad_out.column_sums();
        let d_input = grad_out.matmul_transpose(&self.weights);
        (
            DenseGrads {
                weights: d_weights,
                bias: d_bias,
            },
            d_input,
        )
    }
}

/// Batch normalization with learned scale/shift and running statistics.
///
/// Training mode normalizes by the batch's population mean/variance and
/// updates the running statistics by exponential moving average; inference
/// mode normalizes by the frozen running statistics and accepts batches of
/// any size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchNormLayer {
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
    pub running_mean: Vec<f64>,
    pub running_var: Vec<f64>,
    pub momentum: f64,
    pub eps: f64,
    pub batches_seen: u64,
}

/// Values cached by a training-mode forward pass, needed by backward.
#[derive(Debug, Clone)]
pub struct BnCache {
    pub normalized: Matrix,
    pub inv_std: Vec<f64>,
    pub batch_mean: Vec<f64>,
    pub batch_var: Vec<f64>,
}

/// Gradients of a batch-norm layer's parameters.
#[derive(Debug, Clone)]
pub struct BnGrads {
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
}

impl BatchNormLayer {
    pub fn identity(width: usize) -> Self {
        Self {
            gamma: vec![1.0; width],
            beta: vec![0.0; width],
            running_mean: vec![0.0; width],
            running_var: vec![1.0; width],
            momentum: 0.9,
            eps: 1e-5,
            batches_seen: 0,
        }
    }

    pub fn width(&self) -> usize {
        self.gamma.len()
    }

    fn check_width(&self, x: &Matrix) -> Result<()> {
        if x.cols() != self.width() {
            return Err(Error::DimensionMismatch {
                expected: self.width(),
                got: x.cols(),
            });
        }
        Ok(())
    }

    /// Normalize by batch statistics, scale and shift, and fold the batch
    /// statistics into the running averages.
    pub fn forward_train(&mut self, x: &Matrix) -> Result<(Matrix, BnCache)> {
        self.check_width(x)?;
        let rows = x.rows();
        if rows < 2 {
            return Err(Error::BatchTooSmall { got: rows });
        }
        let n = rows as f64;
        let width = self.width();

        let mut mean = x.column_sums();
        for m in &mut mean {
            *m /= n;
        }
        let mut var = vec![0.0; width];
        for r in 0..rows {
            for (c, &value) in x.row(r).iter().enumerate() {
                let d = value - mean[c];
                var[c] += d * d;
            }
        }
        for v in &mut var {
            *v /= n;
        }
        let inv_std: Vec<f64> = var.iter().map(|&v| 1.0 / (v + self.eps).sqrt()).collect();

        let mut normalized = Matrix::zeros(rows, width);
        let mut out = Matrix::zeros(rows, width);
        for r in 0..rows {
            for c in 0..width {
                let z = (x.get(r, c) - mean[c]) * inv_std[c];
                normalized.set(r, c, z);
                out.set(r, c, self.gamma[c] * z + self.beta[c]);
            }
        }

        for c in 0..width {
            self.running_mean[c] =
                self.momentum * self.running_mean[c] + (1.0 - self.momentum) * mean[c];
            self.running_var[c] =
                self.momentum * self.running_var[c] + (1.0 - self.momentum) * var[c];
        }
        self.batches_seen += 1;

        Ok((
            out,
            BnCache {
                normalized,
                inv_std,
                batch_mean: mean,
                batch_var: var,
            },
        ))
    }

    /// Normalize by the frozen running statistics. Single-row batches are
    /// fine here.
    pub fn forward_infer(&self, x: &Matrix) -> Result<Matrix> {
        self.check_width(x)?;
        if self.batches_seen == 0 {
            return Err(Error::Unfitted);
        }
        let mut out = x.clone();
        for r in 0..out.rows() {
            for (c, value) in out.row_mut(r).iter_mut().enumerate() {
                let z = (*value - self.running_mean[c]) / (self.running_var[c] + self.eps).sqrt();
                *value = self.gamma[c] * z + self.beta[c];
            }
        }
        Ok(out)
    }

    /// Backward through the training-mode normalization.
    pub fn backward(&self, cache: &BnCache, grad_out: &Matrix) -> (BnGrads, Matrix) {
        let rows = grad_out.rows();
        let width = self.width();
        let n = rows as f64;

        let mut d_gamma = vec![0.0; width];
        let mut d_beta = vec![0.0; width];
        for r in 0..rows {
            for (c, &dy) in grad_out.row(r).iter().enumerate() {
                d_gamma[c] += dy * cache.normalized.get(r, c);
                d_beta[c] += dy;
            }
        }

        let mut d_input = Matrix::zeros(rows, width);
        for r in 0..rows {
            for c in 0..width {
                let dy = grad_out.get(r, c);
                let z = cache.normalized.get(r, c);
                let dx = self.gamma[c] * cache.inv_std[c] / n
                    * (n * dy - d_beta[c] - z * d_gamma[c]);
                d_input.set(r, c, dx);
            }
        }

        (
            BnGrads {
                gamma: d_gamma,
                beta: d_beta,
            },
            d_input,
        )
    }
}

fn sigmoid_scalar(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Elementwise logistic function, stable for large magnitudes.
pub fn sigmoid(x: &Matrix) -> Matrix {
    x.map(sigmoid_scalar)
}

/// Backward through sigmoid given its cached output.
pub fn sigmoid_backward(output: &Matrix, grad_out: &Matrix) -> Matrix {
    let mut d_input = grad_out.clone();
    for r in 0..d_input.rows() {
        for (c, g) in d_input.row_mut(r).iter_mut().enumerate() {
            let y = output.get(r, c);
            *g *= y * (1.0 - y);
        }
    }
    d_input
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;

    #[test]
    fn dense_identity_passthrough() {
        let mut layer = DenseLayer {
            weights: Matrix::zeros(3, 3),
            bias: vec![0.0; 3],
        };
        for i in 0..3 {
            layer.weights.set(i, i, 1.0);
        }
        let x = Matrix::from_rows(&[vec![1.0, -2.0, 3.0]]);
        assert_eq!(layer.forward(&x).unwrap(), x);
    }

    #[test]
    fn dense_zero_weights_yield_bias() {
        let layer = DenseLayer {
            weights: Matrix::zeros(2, 2),
            bias: vec![4.0, -1.0],
        };
        let x = Matrix::from_rows(&[vec![5.0, 6.0], vec![-7.0, 8.0]]);
        let out = layer.forward(&x).unwrap();
        for r in 0..2 {
            assert_eq!(out.row(r), &[4.0, -1.0]);
        }
    }

    #[test]
    fn dense_matches_dot_product_oracle() {
        let mut rng = seeded_rng(10);
        let layer = DenseLayer::xavier(4, 5, &mut rng);
        let x = Matrix::from_vec(3, 4, (0..12).map(|i| (i as f64) / 3.0 - 1.5).collect());
        let out = layer.forward(&x).unwrap();
        for r in 0..3 {
            for c in 0..5 {
                let mut acc = layer.bias[c];
                for k in 0..4 {
                    acc += x.get(r, k) * layer.weights.get(k, c);
                }
                assert!((out.get(r, c) - acc).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dense_rejects_width_mismatch() {
        let layer = DenseLayer::xavier(4, 2, &mut seeded_rng(0));
        let x = Matrix::zeros(1, 3);
        assert!(matches!(
            layer.forward(&x),
            Err(Error::DimensionMismatch { expected: 4, got: 3 })
        ));
    }

    #[test]
    fn xavier_statistics() {
        let mut rng = seeded_rng(123);
        let layer = DenseLayer::xavier(100, 100, &mut rng);
        let values = layer.weights.as_slice();
        let n = values.len() as f64;
        let mean: f64 = values.iter().sum::<f64>() / n;
        let std = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
        let expected = (2.0_f64 / 200.0).sqrt();
        assert!((std - expected).abs() / expected < 0.15, "std {std}");
        assert!(layer.bias.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn xavier_deterministic_per_seed() {
        let a = DenseLayer::xavier(6, 6, &mut seeded_rng(9));
        let b = DenseLayer::xavier(6, 6, &mut seeded_rng(9));
        assert_eq!(a, b);
    }

    #[test]
    fn bn_identity_at_init() {
        let layer = BatchNormLayer::identity(4);
        assert!(layer.gamma.iter().all(|&g| g == 1.0));
        assert!(layer.beta.iter().all(|&b| b == 0.0));
        assert_eq!(layer.batches_seen, 0);
    }

    #[test]
    fn bn_train_standardizes_columns() {
        let mut layer = BatchNormLayer::identity(2);
        let x = Matrix::from_rows(&[
            vec![1.0, 10.0],
            vec![2.0, 20.0],
            vec![3.0, 30.0],
            vec![4.0, 40.0],
        ]);
        let (out, _) = layer.forward_train(&x).unwrap();
        for c in 0..2 {
            let mean: f64 = (0..4).map(|r| out.get(r, c)).sum::<f64>() / 4.0;
            let var: f64 = (0..4).map(|r| (out.get(r, c) - mean).powi(2)).sum::<f64>() / 4.0;
            assert!(mean.abs() < 1e-7, "mean {mean}");
            assert!((var - 1.0).abs() < 1e-3, "var {var}");
        }
    }

    #[test]
    fn bn_constant_batch_outputs_beta() {
        let mut layer = BatchNormLayer::identity(2);
        layer.beta = vec![0.5, -0.25];
        let x = Matrix::from_rows(&[vec![7.0, 7.0], vec![7.0, 7.0], vec![7.0, 7.0]]);
        let (out, _) = layer.forward_train(&x).unwrap();
        for r in 0..3 {
            assert_eq!(out.get(r, 0), 0.5);
            assert_eq!(out.get(r, 1), -0.25);
        }
    }

    #[test]
    fn bn_running_stats_follow_ema_oracle() {
        let mut layer = BatchNormLayer::identity(1);
        let batch1 = Matrix::from_rows(&[vec![1.0], vec![3.0]]); // mean 2, var 1
        let batch2 = Matrix::from_rows(&[vec![10.0], vec![14.0]]); // mean 12, var 4
        layer.forward_train(&batch1).unwrap();
        layer.forward_train(&batch2).unwrap();

        // Two-step EMA computed by hand from the initial (0, 1) state.
        let m = 0.9;
        let mean1 = m * 0.0 + (1.0 - m) * 2.0;
        let var1 = m * 1.0 + (1.0 - m) * 1.0;
        let mean2 = m * mean1 + (1.0 - m) * 12.0;
        let var2 = m * var1 + (1.0 - m) * 4.0;
        assert!((layer.running_mean[0] - mean2).abs() < 1e-12);
        assert!((layer.running_var[0] - var2).abs() < 1e-12);
        assert_eq!(layer.batches_seen, 2);
    }

    #[test]
    fn bn_train_rejects_single_row() {
        let mut layer = BatchNormLayer::identity(2);
        let x = Matrix::from_rows(&[vec![1.0, 2.0]]);
        assert!(matches!(
            layer.forward_train(&x),
            Err(Error::BatchTooSmall { got: 1 })
        ));
    }

    #[test]
    fn bn_infer_identity_statistics() {
        let mut layer = BatchNormLayer::identity(2);
        layer.batches_seen = 1; // running stats stay (0, 1)
        let x = Matrix::from_rows(&[vec![0.5, -1.5]]);
        let out = layer.forward_infer(&x).unwrap();
        for c in 0..2 {
            assert!((out.get(0, c) - x.get(0, c)).abs() < 1e-5);
        }
    }

    #[test]
    fn bn_infer_unfitted_rejected_and_deterministic_after_fit() {
        let mut layer = BatchNormLayer::identity(1);
        let single = Matrix::from_rows(&[vec![2.0]]);
        assert!(matches!(layer.forward_infer(&single), Err(Error::Unfitted)));

        let batch = Matrix::from_rows(&[vec![1.0], vec![5.0]]);
        layer.forward_train(&batch).unwrap();
        let a = layer.forward_infer(&single).unwrap();
        let b = layer.forward_infer(&single).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sigmoid_values_and_stability() {
        let x = Matrix::from_rows(&[vec![0.0, 1000.0, -1000.0]]);
        let y = sigmoid(&x);
        assert_eq!(y.get(0, 0), 0.5);
        assert_eq!(y.get(0, 1), 1.0);
        assert_eq!(y.get(0, 2), 0.0);
        assert!(y.as_slice().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn sigmoid_complement_identity() {
        let xs = [-3.7, -0.2, 0.9, 4.4, 17.0];
        for &x in &xs {
            let lhs = sigmoid_scalar(x) + sigmoid_scalar(-x);
            assert!((lhs - 1.0).abs() < 1e-12);
        }
    }
}
