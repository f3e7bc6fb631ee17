use serde::{Deserialize, Serialize};

use super::{check_width, require_trainable, Classifier, ModelFactory};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::nn::{self, Activation, AdamParams, LayerSpec, Loss, Network, NetworkSpec, Padding, Tensor};

/// Four same-padded conv layers, then five dense layers with dropout after
/// each of the first four. The last dense layer has two sigmoid units,
/// `(negative, positive)`, trained on one-hot targets with cross-entropy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CnnConfig {
    pub conv_filters: [usize; 4],
    pub kernel: usize,
    pub stride: usize,
    pub conv_l2: f64,
    pub dense_units: [usize; 5],
    pub dense_l2: f64,
    pub dropout: f64,
    pub lr: f64,
    pub epochs: usize,
    pub batch_size: usize,
}

impl Default for CnnConfig {
    fn default() -> Self {
        CnnConfig {
            conv_filters: [256; 4],
            kernel: 3,
            stride: 1,
            conv_l2: 0.2,
            dense_units: [256, 128, 64, 32, 2],
            dense_l2: 0.0,
            dropout: 0.5,
            lr: 0.001,
            epochs: 100,
            batch_size: 256,
        }
    }
}

pub fn build_cnn(cfg: &CnnConfig, n_features: usize, seed: u64) -> Result<NetworkSpec> {
    if n_features < cfg.kernel {
        return Err(Error::Config(format!(
            "{n_features} features is shorter than the conv kernel {}",
            cfg.kernel
        )));
    }
    if cfg.dense_units[4] != 2 {
        return Err(Error::Config("the output layer must have 2 units".into()));
    }
    let mut layers = Vec::with_capacity(14);
    for &filters in &cfg.conv_filters {
        layers.push(LayerSpec::Conv1d {
            filters,
            kernel: cfg.kernel,
            stride: cfg.stride,
            padding: Padding::Same,
            l2: cfg.conv_l2,
            activation: Activation::Relu,
        });
    }
    layers.push(LayerSpec::Flatten);
    for &units in &cfg.dense_units[..4] {
        layers.push(LayerSpec::Dense {
            units,
            l2: cfg.dense_l2,
            activation: Activation::Relu,
        });
        layers.push(LayerSpec::Dropout { p: cfg.dropout });
    }
    layers.push(LayerSpec::Dense {
        units: cfg.dense_units[4],
        l2: cfg.dense_l2,
        activation: Activation::Sigmoid,
    });
    let spec = NetworkSpec {
        input_shape: vec![n_features, 1],
        layers,
        loss: Loss::BinaryCrossEntropy,
        optimizer: AdamParams {
            lr: cfg.lr,
            ..AdamParams::default()
        },
        epochs: cfg.epochs,
        batch_size: cfg.batch_size,
        seed,
    };
    spec.validate()?;
    Ok(spec)
}

/// Conv and dense layers; flatten and dropout are not counted.
pub fn main_layer_count(spec: &NetworkSpec) -> usize {
    spec.layers
        .iter()
        .filter(|l| matches!(l, LayerSpec::Conv1d { .. } | LayerSpec::Dense { .. }))
        .count()
}

/// `o_pos / (o_pos + o_neg)`, or 0.5 when both outputs are zero.
pub fn reduce_two_unit_output(o_neg: f64, o_pos: f64) -> f64 {
    let total = o_neg + o_pos;
    if total > 0.0 {
        o_pos / total
    } else {
        0.5
    }
}

#[derive(Debug, Clone)]
pub struct CnnModel {
    pub net: Network,
    pub loss_history: Vec<f64>,
}

impl CnnModel {
    pub fn n_features(&self) -> usize {
        self.net.spec().input_shape[0]
    }
}

pub(crate) fn as_conv_input(features: &Matrix) -> Result<Tensor> {
    Tensor::new(vec![features.rows(), features.cols(), 1], features.as_slice().to_vec())
}

impl Classifier for CnnModel {
    fn predict_scores(&self, features: &Matrix) -> Result<Vec<f64>> {
        check_width(features, self.n_features())?;
        let out = self.net.predict(&as_conv_input(features)?)?;
        Ok(out
            .data()
            .chunks_exact(2)
            .map(|o| reduce_two_unit_output(o[0], o[1]))
            .collect())
    }
}

impl ModelFactory for CnnConfig {
    fn name(&self) -> &str {
        "cnn"
    }

    fn fit(&self, train: &Dataset, seed: u64) -> Result<Box<dyn Classifier>> {
        require_trainable(train)?;
        let spec = build_cnn(self, train.n_features(), seed)?;
        let mut net = Network::init(spec)?;
        let x = as_conv_input(train.features())?;
        let targets: Vec<f64> = train
            .labels()
            .iter()
            .flat_map(|l| if l.is_positive() { [0.0, 1.0] } else { [1.0, 0.0] })
            .collect();
        let y = Tensor::new(vec![train.n_samples(), 2], targets)?;
        let report = nn::train(&mut net, &x, &y)?;
        Ok(Box::new(CnnModel {
            net,
            loss_history: report.loss_history,
        }))
    }
}
