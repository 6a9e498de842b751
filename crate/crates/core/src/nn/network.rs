//! Layer stack: initialization, forward passes, and backpropagation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::seeded_rng;

use super::layer::{
    sigmoid, sigmoid_backward, BatchNormLayer, BnCache, DenseLayer,
};
use super::layout::{LayerDesc, NetworkSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Layer {
    Dense(DenseLayer),
    BatchNorm(BatchNormLayer),
    Sigmoid,
}

/// Per-layer state cached by a training-mode forward pass.
#[derive(Debug, Clone)]
enum LayerCache {
    Dense { input: Matrix },
    BatchNorm(BnCache),
    Sigmoid { output: Matrix },
}

/// Everything backward needs from one forward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    batch_rows: usize,
    entries: Vec<LayerCache>,
}

/// Parameter gradients, one entry per layer in network order.
#[derive(Debug, Clone)]
pub enum LayerGrads {
    Dense { weights: Matrix, bias: Vec<f64> },
    BatchNorm { gamma: Vec<f64>, beta: Vec<f64> },
    Sigmoid,
}

#[derive(Debug, Clone)]
pub struct Gradients {
    pub per_layer: Vec<LayerGrads>,
}

impl Gradients {
    /// Flat gradient tensors in the fixed parameter order (dense weights,
    /// dense bias, bn gamma, bn beta; layers in network order).
    pub fn tensor_slices(&self) -> Vec<&[f64]> {
        let mut out = Vec::new();
        for grads in &self.per_layer {
            match grads {
                LayerGrads::Dense { weights, bias } => {
                    out.push(weights.as_slice());
                    out.push(bias.as_slice());
                }
                LayerGrads::BatchNorm { gamma, beta } => {
                    out.push(gamma.as_slice());
                    out.push(beta.as_slice());
                }
                LayerGrads::Sigmoid => {}
            }
        }
        out
    }
}

/// A concrete layer stack built from a [`NetworkSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    spec: NetworkSpec,
    layers: Vec<Layer>,
}

impl Network {
    /// Instantiate with Xavier-initialized dense layers (zero biases) and
    /// identity batch-norm layers. Deterministic per seed.
    pub fn init(spec: &NetworkSpec, seed: u64) -> Result<Self> {
        spec.validate()?;
        let mut rng = seeded_rng(seed);
        let mut width = spec.input_dim;
        let mut layers = Vec::with_capacity(spec.layout.len());
        for desc in &spec.layout {
            match desc {
                LayerDesc::Dense(out) => {
                    layers.push(Layer::Dense(DenseLayer::xavier(width, *out, &mut rng)));
                    width = *out;
                }
                LayerDesc::BatchNorm => {
                    layers.push(Layer::BatchNorm(BatchNormLayer::identity(width)));
                }
                LayerDesc::Sigmoid => layers.push(Layer::Sigmoid),
            }
        }
        Ok(Self {
            spec: spec.clone(),
            layers,
        })
    }

    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    fn check_input(&self, x: &Matrix) -> Result<()> {
        if x.cols() != self.spec.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.spec.input_dim,
                got: x.cols(),
            });
        }
        Ok(())
    }

    /// Forward in training mode: batch-norm layers use batch statistics and
    /// update their running averages.
    pub fn forward_train(&mut self, x: &Matrix) -> Result<(Matrix, ForwardCache)> {
        self.check_input(x)?;
        let batch_rows = x.rows();
        let mut current = x.clone();
        let mut entries = Vec::with_capacity(self.layers.len());
        for layer in &mut self.layers {
            current = match layer {
                Layer::Dense(dense) => {
                    let out = dense.forward(&current)?;
                    entries.push(LayerCache::Dense { input: current });
                    out
                }
                Layer::BatchNorm(bn) => {
                    let (out, cache) = bn.forward_train(&current)?;
                    entries.push(LayerCache::BatchNorm(cache));
                    out
                }
                Layer::Sigmoid => {
                    let out = sigmoid(&current);
                    entries.push(LayerCache::Sigmoid {
                        output: out.clone(),
                    });
                    out
                }
            };
        }
        Ok((current, ForwardCache { batch_rows, entries }))
    }

    /// Forward in inference mode: batch-norm layers use frozen running
    /// statistics; any batch size is accepted.
    pub fn forward_infer(&self, x: &Matrix) -> Result<Matrix> {
        self.check_input(x)?;
        let mut current = x.clone();
        for layer in &self.layers {
            current = match layer {
                Layer::Dense(dense) => dense.forward(&current)?,
                Layer::BatchNorm(bn) => bn.forward_infer(&current)?,
                Layer::Sigmoid => sigmoid(&current),
            };
        }
        Ok(current)
    }

    /// Backpropagate a loss gradient through the cached forward pass.
    pub fn backward(&self, cache: &ForwardCache, loss_grad: &Matrix) -> Result<Gradients> {
        if cache.entries.len() != self.layers.len() {
            return Err(Error::StaleCache(format!(
                "cache has {} entries, network has {} layers",
                cache.entries.len(),
                self.layers.len()
            )));
        }
        if loss_grad.rows() != cache.batch_rows || loss_grad.cols() != self.spec.num_classes {
            return Err(Error::StaleCache(format!(
                "loss gradient is {}x{}, expected {}x{}",
                loss_grad.rows(),
                loss_grad.cols(),
                cache.batch_rows,
                self.spec.num_classes
            )));
        }

        let mut grad = loss_grad.clone();
        let mut per_layer = vec![LayerGrads::Sigmoid; self.layers.len()];
        for (idx, (layer, entry)) in self
            .layers
            .iter()
            .zip(&cache.entries)
            .enumerate()
            .rev()
        {
            match (layer, entry) {
                (Layer::Dense(dense), LayerCache::Dense { input }) => {
                    let (grads, d_input) = dense.backward(input, &grad);
                    per_layer[idx] = LayerGrads::Dense {
                        weights: grads.weights,
                        bias: grads.bias,
                    };
                    grad = d_input;
                }
                (Layer::BatchNorm(bn), LayerCache::BatchNorm(bn_cache)) => {
                    let (grads, d_input) = bn.backward(bn_cache, &grad);
                    per_layer[idx] = LayerGrads::BatchNorm {
                        gamma: grads.gamma,
                        beta: grads.beta,
                    };
                    grad = d_input;
                }
                (Layer::Sigmoid, LayerCache::Sigmoid { output }) => {
                    grad = sigmoid_backward(output, &grad);
                }
                _ => {
                    return Err(Error::StaleCache(format!(
                        "layer {idx} does not match its cache entry"
                    )))
                }
            }
        }
        Ok(Gradients { per_layer })
    }

    /// Lengths of the flat parameter tensors, in the fixed order used by the
    /// optimizer.
    pub fn tensor_lens(&self) -> Vec<usize> {
        let mut lens = Vec::new();
        for layer in &self.layers {
            match layer {
                Layer::Dense(dense) => {
                    lens.push(dense.weights.as_slice().len());
                    lens.push(dense.bias.len());
                }
                Layer::BatchNorm(bn) => {
                    lens.push(bn.gamma.len());
                    lens.push(bn.beta.len());
                }
                Layer::Sigmoid => {}
            }
        }
        lens
    }

    /// Mutable views of the flat parameter tensors, matching
    /// [`Gradients::tensor_slices`] order.
    pub fn tensor_slices_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = Vec::new();
        for layer in &mut self.layers {
            match layer {
                Layer::Dense(dense) => {
                    out.push(dense.weights.as_mut_slice());
                    out.push(dense.bias.as_mut_slice());
                }
                Layer::BatchNorm(bn) => {
                    out.push(bn.gamma.as_mut_slice());
                    out.push(bn.beta.as_mut_slice());
                }
                Layer::Sigmoid => {}
            }
        }
        out
    }
}
