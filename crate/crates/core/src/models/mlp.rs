use serde::{Deserialize, Serialize};

use super::{check_width, require_trainable, Classifier, ModelFactory};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::nn::{self, Activation, AdamParams, LayerSpec, Loss, Network, NetworkSpec, Tensor};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlpConfig {
    pub hidden: Vec<usize>,
    pub lr: f64,
    pub epochs: usize,
    pub batch_size: usize,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            hidden: vec![64, 32],
            lr: 0.001,
            epochs: 200,
            batch_size: 32,
        }
    }
}

impl MlpConfig {
    pub fn network_spec(&self, n_features: usize, seed: u64) -> Result<NetworkSpec> {
        if self.hidden.contains(&0) {
            return Err(Error::Config("mlp hidden widths must be positive".into()));
        }
        let mut layers: Vec<LayerSpec> = self
            .hidden
            .iter()
            .map(|&units| LayerSpec::Dense {
                units,
                l2: 0.0,
                activation: Activation::Relu,
            })
            .collect();
        layers.push(LayerSpec::Dense {
            units: 1,
            l2: 0.0,
            activation: Activation::Sigmoid,
        });
        let spec = NetworkSpec {
            input_shape: vec![n_features],
            layers,
            loss: Loss::BinaryCrossEntropy,
            optimizer: AdamParams {
                lr: self.lr,
                ..AdamParams::default()
            },
            epochs: self.epochs,
            batch_size: self.batch_size,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Dense ReLU stack with a single sigmoid output.
#[derive(Debug, Clone)]
pub struct MlpModel {
    pub net: Network,
}

impl Classifier for MlpModel {
    fn predict_scores(&self, features: &Matrix) -> Result<Vec<f64>> {
        check_width(features, self.net.spec().input_shape[0])?;
        let x = Tensor::new(vec![features.rows(), features.cols()], features.as_slice().to_vec())?;
        Ok(self.net.predict(&x)?.into_data())
    }
}

impl ModelFactory for MlpConfig {
    fn name(&self) -> &str {
        "mlp"
    }

    fn fit(&self, train: &Dataset, seed: u64) -> Result<Box<dyn Classifier>> {
        require_trainable(train)?;
        let mut net = Network::init(self.network_spec(train.n_features(), seed)?)?;
        let x = Tensor::new(
            vec![train.n_samples(), train.n_features()],
            train.features().as_slice().to_vec(),
        )?;
        let y = Tensor::new(
            vec![train.n_samples(), 1],
            train.labels().iter().map(|l| l.as_target()).collect(),
        )?;
        nn::train(&mut net, &x, &y)?;
        Ok(Box::new(MlpModel { net }))
    }
}
