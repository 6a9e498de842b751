//! Softmax + mean cross-entropy head.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Row-wise softmax with log-sum-exp stabilization.
pub fn softmax(logits: &Matrix) -> Matrix {
    let mut out = logits.clone();
    for r in 0..out.rows() {
        let row = out.row_mut(r);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        for v in row.iter_mut() {
            *v /= sum;
        }
    }
    out
}

/// Mean cross-entropy over the batch and its gradient with respect to the
/// logits, `(softmax - one_hot) / batch_size`.
pub fn softmax_cross_entropy(logits: &Matrix, labels: &[usize]) -> Result<(f64, Matrix)> {
    if labels.len() != logits.rows() {
        return Err(Error::LengthMismatch {
            left: logits.rows(),
            right: labels.len(),
        });
    }
    if logits.rows() == 0 {
        return Err(Error::EmptyInput);
    }
    let num_classes = logits.cols();
    if let Some(&bad) = labels.iter().find(|&&l| l >= num_classes) {
        return Err(Error::LabelOutOfRange {
            label: bad,
            num_classes,
        });
    }

    let batch = logits.rows() as f64;
    let mut grad = softmax(logits);
    let mut loss = 0.0;
    for (r, &label) in labels.iter().enumerate() {
        let row = logits.row(r);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log_sum = max + row.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
        loss += log_sum - row[label];

        let grad_row = grad.row_mut(r);
        grad_row[label] -= 1.0;
        for g in grad_row.iter_mut() {
            *g /= batch;
        }
    }
    Ok((loss / batch, grad))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_logits_loss_is_ln_num_classes() {
        let logits = Matrix::zeros(3, 6);
        let (loss, _) = softmax_cross_entropy(&logits, &[0, 3, 5]).unwrap();
        assert!((loss - 6.0_f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn per_row_shift_invariance() {
        let logits = Matrix::from_rows(&[vec![0.4, -1.0, 2.0], vec![3.0, 3.0, -0.5]]);
        let mut shifted = logits.clone();
        for r in 0..shifted.rows() {
            for v in shifted.row_mut(r).iter_mut() {
                *v += 17.25;
            }
        }
        let (loss_a, grad_a) = softmax_cross_entropy(&logits, &[2, 0]).unwrap();
        let (loss_b, grad_b) = softmax_cross_entropy(&shifted, &[2, 0]).unwrap();
        assert!((loss_a - loss_b).abs() < 1e-9);
        for (a, b) in grad_a.as_slice().iter().zip(grad_b.as_slice()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn probabilities_sum_to_one() {
        let logits = Matrix::from_rows(&[vec![5.0, -3.0, 0.1, 700.0], vec![-2.0, -2.0, 1.0, 0.0]]);
        let probs = softmax(&logits);
        for r in 0..probs.rows() {
            let sum: f64 = probs.row(r).iter().sum();
            assert!((sum - 1.0).abs() < 1e-9);
            assert!(probs.row(r).iter().all(|&p| (0.0..=1.0).contains(&p)));
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let logits = Matrix::from_vec(
            4,
            6,
            (0..24).map(|i| ((i * 7919 % 100) as f64) / 25.0 - 2.0).collect(),
        );
        let labels = [1usize, 5, 0, 3];
        let (_, grad) = softmax_cross_entropy(&logits, &labels).unwrap();

        let h = 1e-6;
        for r in 0..4 {
            for c in 0..6 {
                let mut plus = logits.clone();
                plus.set(r, c, plus.get(r, c) + h);
                let mut minus = logits.clone();
                minus.set(r, c, minus.get(r, c) - h);
                let (lp, _) = softmax_cross_entropy(&plus, &labels).unwrap();
                let (lm, _) = softmax_cross_entropy(&minus, &labels).unwrap();
                let numeric = (lp - lm) / (2.0 * h);
                let analytic = grad.get(r, c);
                let denom = analytic.abs().max(numeric.abs()).max(1e-8);
                assert!(
                    (analytic - numeric).abs() / denom < 1e-6,
                    "({r},{c}): analytic {analytic}, numeric {numeric}"
                );
            }
        }
    }

    #[test]
    fn label_out_of_range() {
        let logits = Matrix::zeros(1, 6);
        assert!(matches!(
            softmax_cross_entropy(&logits, &[6]),
            Err(Error::LabelOutOfRange { label: 6, .. })
        ));
    }

    #[test]
    fn length_mismatch_and_empty() {
        let logits = Matrix::zeros(2, 6);
        assert!(matches!(
            softmax_cross_entropy(&logits, &[0]),
            Err(Error::LengthMismatch { .. })
        ));
        let empty = Matrix::zeros(0, 6);
        assert!(matches!(
            softmax_cross_entropy(&empty, &[]),
            Err(Error::EmptyInput)
        ));
    }
}
