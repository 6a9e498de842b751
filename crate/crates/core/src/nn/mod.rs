//! Dense network with embedded batch normalization: Xavier initialization,
//! sigmoid hidden activations, a softmax/cross-entropy head, Adam updates,
//! and the mini-batch training loop.

mod adam;
mod layer;
mod layout;
mod loss;
mod network;
mod train;

pub use adam::{adam_update_slice, AdamState, MomentPair};
pub use layer::{sigmoid, sigmoid_backward, BatchNormLayer, BnCache, DenseLayer};
pub use layout::{make_layout, LayerDesc, LayoutKind, NetworkSpec};
pub use loss::{softmax, softmax_cross_entropy};
pub use network::{ForwardCache, Gradients, Layer, LayerGrads, Network};
pub use train::{predict, train, EpochStats, TrainConfig, TrainedModel, MODEL_FORMAT_VERSION};
