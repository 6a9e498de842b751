//! Network layouts: dense/batch-norm interleavings and depth variants.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One layer slot. `Dense` carries its output width; the final `Dense` feeds
/// the softmax head directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LayerDesc {
    Dense(usize),
    BatchNorm,
    Sigmoid,
}

/// Named layouts for the BN-placement and depth comparisons.
///
/// The three `Structure*` layouts and `Sbnednn` differ only in where batch
/// normalization sits; `Depth(k)` stacks `k` dense layers with BN after every
/// hidden one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LayoutKind {
    Structure1,
    Structure2,
    Structure3,
    Sbnednn,
    Depth(usize),
}

impl LayoutKind {
    pub const BN_LAYOUTS: [LayoutKind; 4] = [
        LayoutKind::Structure1,
        LayoutKind::Structure2,
        LayoutKind::Structure3,
        LayoutKind::Sbnednn,
    ];

    pub const DEPTHS: [LayoutKind; 5] = [
        LayoutKind::Depth(3),
        LayoutKind::Depth(4),
        LayoutKind::Depth(5),
        LayoutKind::Depth(6),
        LayoutKind::Depth(7),
    ];
}

impl fmt::Display for LayoutKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LayoutKind::Structure1 => write!(f, "structure1"),
            LayoutKind::Structure2 => write!(f, "structure2"),
            LayoutKind::Structure3 => write!(f, "structure3"),
            LayoutKind::Sbnednn => write!(f, "sbnednn"),
            LayoutKind::Depth(k) => write!(f, "depth{k}"),
        }
    }
}

impl FromStr for LayoutKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "structure1" => Ok(LayoutKind::Structure1),
            "structure2" => Ok(LayoutKind::Structure2),
            "structure3" => Ok(LayoutKind::Structure3),
            "sbnednn" => Ok(LayoutKind::Sbnednn),
            _ => {
                if let Some(depth) = s.strip_prefix("depth") {
                    if let Ok(k) = depth.parse::<usize>() {
                        if (3..=7).contains(&k) {
                            return Ok(LayoutKind::Depth(k));
                        }
                    }
                }
                Err(Error::InvalidKind(s.to_string()))
            }
        }
    }
}

/// Layer layout plus the dimensions needed to instantiate it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub layout: Vec<LayerDesc>,
    pub input_dim: usize,
    pub num_classes: usize,
    pub hidden_width: usize,
}

impl NetworkSpec {
    /// Widths flowing through the layout, starting from `input_dim`.
    /// Errors if the chain is malformed.
    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 || self.num_classes == 0 {
            return Err(Error::InvalidConfig(
                "input_dim and num_classes must be positive".into(),
            ));
        }
        let first = self.layout.first().ok_or_else(|| {
            Error::InvalidConfig("layout must contain at least one layer".into())
        })?;
        if !matches!(first, LayerDesc::Dense(_)) {
            return Err(Error::InvalidConfig("first layer must be Dense".into()));
        }
        let mut previous_was_bn = false;
        let mut last_dense_width = None;
        for desc in &self.layout {
            match desc {
                LayerDesc::Dense(width) => {
                    if *width == 0 {
                        return Err(Error::InvalidConfig("zero-width dense layer".into()));
                    }
                    last_dense_width = Some(*width);
                    previous_was_bn = false;
                }
                LayerDesc::BatchNorm => {
                    if previous_was_bn {
                        return Err(Error::InvalidConfig(
                            "consecutive batch-norm layers".into(),
                        ));
                    }
                    previous_was_bn = true;
                }
                LayerDesc::Sigmoid => previous_was_bn = false,
            }
        }
        if !matches!(self.layout.last(), Some(LayerDesc::Dense(_))) {
            return Err(Error::InvalidConfig(
                "layout must end with the Dense output layer".into(),
            ));
        }
        if last_dense_width != Some(self.num_classes) {
            return Err(Error::InvalidConfig(format!(
                "output layer width {last_dense_width:?} != num_classes {}",
                self.num_classes
            )));
        }
        Ok(())
    }

    pub fn dense_count(&self) -> usize {
        self.layout
            .iter()
            .filter(|d| matches!(d, LayerDesc::Dense(_)))
            .count()
    }

    pub fn batch_norm_count(&self) -> usize {
        self.layout
            .iter()
            .filter(|d| matches!(d, LayerDesc::BatchNorm))
            .count()
    }
}

/// Build the layout for a named kind.
///
/// Sigmoid follows every BN, and every hidden dense layer that no BN follows;
/// the final dense layer feeds softmax directly.
pub fn make_layout(
    kind: LayoutKind,
    input_dim: usize,
    num_classes: usize,
    hidden_width: usize,
) -> Result<NetworkSpec> {
    use LayerDesc::{BatchNorm, Dense, Sigmoid};

    let h = hidden_width;
    let layout = match kind {
        LayoutKind::Structure1 => vec![
            Dense(h),
            Sigmoid,
            Dense(h),
            Sigmoid,
            Dense(num_classes),
        ],
        LayoutKind::Structure2 => vec![
            Dense(h),
            Sigmoid,
            Dense(h),
            BatchNorm,
            Sigmoid,
            Dense(num_classes),
        ],
        LayoutKind::Structure3 => vec![
            Dense(h),
            BatchNorm,
            Sigmoid,
            Dense(h),
            Sigmoid,
            Dense(num_classes),
        ],
        LayoutKind::Sbnednn => vec![
            Dense(h),
            BatchNorm,
            Sigmoid,
            Dense(h),
            BatchNorm,
            Sigmoid,
            Dense(num_classes),
        ],
        LayoutKind::Depth(k) => {
            if !(3..=7).contains(&k) {
                return Err(Error::InvalidKind(format!("depth{k}")));
            }
            let mut layout = Vec::with_capacity(3 * (k - 1) + 1);
            for _ in 0..k - 1 {
                layout.push(Dense(h));
                layout.push(BatchNorm);
                layout.push(Sigmoid);
            }
            layout.push(Dense(num_classes));
            layout
        }
    };

    let spec = NetworkSpec {
        layout,
        input_dim,
        num_classes,
        hidden_width,
    };
    spec.validate()?;
    Ok(spec)
}
