use serde::{Deserialize, Serialize};

use super::{check_width, require_trainable, Classifier, ModelFactory};
use crate::data::Dataset;
use crate::error::Result;
use crate::matrix::Matrix;
use crate::nn::{data_loss, sigmoid, Loss};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogRegConfig {
    pub lr: f64,
    pub epochs: usize,
    pub l2: f64,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        LogRegConfig {
            lr: 0.1,
            epochs: 500,
            l2: 1e-4,
        }
    }
}

/// `sigmoid(w . x + b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticRegression {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub loss_history: Vec<f64>,
}

impl LogisticRegression {
    pub fn zeros(n_features: usize) -> Self {
        LogisticRegression {
            weights: vec![0.0; n_features],
            bias: 0.0,
            loss_history: Vec::new(),
        }
    }

    fn score_row(&self, row: &[f64]) -> f64 {
        sigmoid(self.bias + row.iter().zip(&self.weights).map(|(x, w)| x * w).sum::<f64>())
    }

    /// Full-batch gradient descent on mean cross-entropy plus `l2 * |w|^2`.
    pub fn fit(train: &Dataset, cfg: &LogRegConfig) -> Result<Self> {
        require_trainable(train)?;
        let n = train.n_samples() as f64;
        let mut model = Self::zeros(train.n_features());
        let targets: Vec<f64> = train.labels().iter().map(|l| l.as_target()).collect();
        let mut grad_w = vec![0.0; train.n_features()];
        for _ in 0..cfg.epochs {
            grad_w.iter_mut().for_each(|g| *g = 0.0);
            let mut grad_b = 0.0;
            let mut preds = Vec::with_capacity(targets.len());
            for (row, &t) in train.features().iter_rows().zip(&targets) {
                let p = model.score_row(row);
                preds.push(p);
                let r = p - t;
                for (g, x) in grad_w.iter_mut().zip(row) {
                    *g += r * x;
                }
                grad_b += r;
            }
            let penalty: f64 = model.weights.iter().map(|w| w * w).sum::<f64>() * cfg.l2;
            model
                .loss_history
                .push(data_loss(Loss::BinaryCrossEntropy, &preds, &targets, targets.len()) + penalty);
            for (w, g) in model.weights.iter_mut().zip(&grad_w) {
                *w -= cfg.lr * (g / n + 2.0 * cfg.l2 * *w);
            }
            model.bias -= cfg.lr * grad_b / n;
        }
        Ok(model)
    }
}

impl Classifier for LogisticRegression {
    fn predict_scores(&self, features: &Matrix) -> Result<Vec<f64>> {
        check_width(features, self.weights.len())?;
        Ok(features.iter_rows().map(|r| self.score_row(r)).collect())
    }
}

impl ModelFactory for LogRegConfig {
    fn name(&self) -> &str {
        "logreg"
    }

    fn fit(&self, train: &Dataset, _seed: u64) -> Result<Box<dyn Classifier>> {
        Ok(Box::new(LogisticRegression::fit(train, self)?))
    }
}
