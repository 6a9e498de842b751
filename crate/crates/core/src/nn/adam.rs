//! Adam optimizer with bias correction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// First/second moment buffers for one parameter tensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentPair {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
}

impl MomentPair {
    fn zeros(len: usize) -> Self {
        Self {
            m: vec![0.0; len],
            v: vec![0.0; len],
        }
    }
}

/// Optimizer state: one moment pair per parameter tensor plus the shared
/// step counter and hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub t: u64,
    slots: Vec<MomentPair>,
}

impl AdamState {
    /// Fresh state for parameter tensors of the given lengths.
    pub fn new(lr: f64, tensor_lens: &[usize]) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
            slots: tensor_lens.iter().map(|&len| MomentPair::zeros(len)).collect(),
        }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    /// One optimizer step over every tensor. `params` and `grads` must match
    /// the slot layout this state was built for; `t` increments exactly once.
    pub fn step(&mut self, params: &mut [&mut [f64]], grads: &[&[f64]]) -> Result<()> {
        if params.len() != self.slots.len() || grads.len() != self.slots.len() {
            return Err(Error::DimensionMismatch {
                expected: self.slots.len(),
                got: params.len().min(grads.len()),
            });
        }
        self.t += 1;
        for ((slot, param), grad) in self.slots.iter_mut().zip(params.iter_mut()).zip(grads) {
            if param.len() != slot.m.len() || grad.len() != slot.m.len() {
                return Err(Error::DimensionMismatch {
                    expected: slot.m.len(),
                    got: param.len().min(grad.len()),
                });
            }
            adam_update_slice(
                &mut slot.m,
                &mut slot.v,
                param,
                grad,
                self.t,
                self.lr,
                self.beta1,
                self.beta2,
                self.eps,
            );
        }
        Ok(())
    }
}

/// The bias-corrected Adam update applied to one flat tensor.
#[allow(clippy::too_many_arguments)]
pub fn adam_update_slice(
    m: &mut [f64],
    v: &mut [f64],
    params: &mut [f64],
    grads: &[f64],
    t: u64,
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
) {
    let bias1 = 1.0 - beta1.powi(t as i32);
    let bias2 = 1.0 - beta2.powi(t as i32);
    for i in 0..params.len() {
        let g = grads[i];
        m[i] = beta1 * m[i] + (1.0 - beta1) * g;
        v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
        let m_hat = m[i] / bias1;
        let v_hat = v[i] / bias2;
        params[i] -= lr * m_hat / (v_hat.sqrt() + eps);
    }
}
