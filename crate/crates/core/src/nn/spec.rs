use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Sigmoid,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Padding {
    /// Zero padding so that the output length is `ceil(len / stride)`.
    #[default]
    Same,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum LayerSpec {
    /// Channels-last 1D convolution: input `[len, in_channels]`.
    Conv1d {
        filters: usize,
        kernel: usize,
        stride: usize,
        #[serde(default)]
        padding: Padding,
        l2: f64,
        activation: Activation,
    },
    Dense {
        units: usize,
        l2: f64,
        activation: Activation,
    },
    /// Inverted dropout; identity outside training.
    Dropout { p: f64 },
    Flatten,
}

impl LayerSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            LayerSpec::Conv1d { .. } => "conv1d",
            LayerSpec::Dense { .. } => "dense",
            LayerSpec::Dropout { .. } => "dropout",
            LayerSpec::Flatten => "flatten",
        }
    }

    /// Per-sample output shape for a per-sample input shape.
    pub(crate) fn output_shape(&self, index: usize, input: &[usize]) -> Result<Vec<usize>> {
        let bad = |msg: String| Error::Shape(format!("layer {index} ({}): {msg}", self.kind()));
        match *self {
            LayerSpec::Conv1d {
                filters,
                kernel,
                stride,
                l2,
                ..
            } => {
                if filters == 0 || kernel == 0 || stride == 0 {
                    return Err(bad("filters, kernel and stride must be at least 1".into()));
                }
                if !(l2 >= 0.0) {
                    return Err(bad(format!("l2 must be non-negative, got {l2}")));
                }
                let &[len, _channels] = input else {
                    return Err(bad(format!("expects a [length, channels] input, got {input:?}")));
                };
                if len < kernel {
                    return Err(bad(format!("input length {len} is shorter than kernel {kernel}")));
                }
                Ok(vec![len.div_ceil(stride), filters])
            }
            LayerSpec::Dense { units, l2, .. } => {
                if units == 0 {
                    return Err(bad("units must be at least 1".into()));
                }
                if !(l2 >= 0.0) {
                    return Err(bad(format!("l2 must be non-negative, got {l2}")));
                }
                if input.len() != 1 {
                    return Err(bad(format!(
                        "expects a flat input, got {input:?} (insert a flatten layer)"
                    )));
                }
                Ok(vec![units])
            }
            LayerSpec::Dropout { p } => {
                if !(0.0..1.0).contains(&p) {
                    return Err(bad(format!("p must lie in [0, 1), got {p}")));
                }
                Ok(input.to_vec())
            }
            LayerSpec::Flatten => Ok(vec![input.iter().product()]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Loss {
    /// Summed over output units, averaged over the batch.
    BinaryCrossEntropy,
    /// Averaged over output units and the batch.
    MeanSquaredError,
}

/// Predictions are clamped to `[BCE_EPSILON, 1 - BCE_EPSILON]` before the log.
pub const BCE_EPSILON: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdamParams {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamParams {
    fn default() -> Self {
        AdamParams {
            lr: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-7,
        }
    }
}

impl AdamParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lr > 0.0) {
            return Err(Error::Config(format!("adam lr must be positive, got {}", self.lr)));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(Error::Config("adam betas must lie in [0, 1)".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::Config("adam epsilon must be positive".into()));
        }
        Ok(())
    }
}

/// Sequential network description plus its training schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    /// Per-sample input shape, without the batch axis.
    pub input_shape: Vec<usize>,
    pub layers: Vec<LayerSpec>,
    pub loss: Loss,
    pub optimizer: AdamParams,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl NetworkSpec {
    /// Per-sample shapes: entry 0 is the input, entry `i + 1` the output of
    /// layer `i`.
    pub fn shapes(&self) -> Result<Vec<Vec<usize>>> {
        if self.input_shape.is_empty() || self.input_shape.contains(&0) {
            return Err(Error::Shape(format!(
                "input shape {:?} must be non-empty and positive",
                self.input_shape
            )));
        }
        let mut shapes = vec![self.input_shape.clone()];
        for (i, layer) in self.layers.iter().enumerate() {
            let next = layer.output_shape(i, shapes.last().expect("non-empty"))?;
            shapes.push(next);
        }
        if shapes.last().expect("non-empty").len() != 1 {
            return Err(Error::Shape(format!(
                "network output {:?} must be flat for the loss",
                shapes.last().expect("non-empty")
            )));
        }
        Ok(shapes)
    }

    pub fn validate(&self) -> Result<()> {
        self.shapes()?;
        self.optimizer.validate()?;
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be at least 1".into()));
        }
        Ok(())
    }

    pub fn output_dim(&self) -> Result<usize> {
        Ok(self.shapes()?.last().expect("non-empty")[0])
    }
}
