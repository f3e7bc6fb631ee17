//! Classifiers behind one contract: the convolutional network and the
//! classical baselines it is compared against.

mod cnn;
mod forest;
mod logreg;
mod mlp;
mod tree;

pub use cnn::{build_cnn, main_layer_count, reduce_two_unit_output, CnnConfig, CnnModel};
pub use forest::{Forest, ForestConfig};
pub use logreg::{LogRegConfig, LogisticRegression};
pub use mlp::{MlpConfig, MlpModel};
pub use tree::{gini, DecisionTree, TreeConfig, TreeNode};

use std::fmt::Debug;

use crate::data::{Dataset, Label};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// A fitted binary classifier.
pub trait Classifier: Debug + Send + Sync {
    /// Positive-class score in `[0, 1]` for every row of `features`.
    fn predict_scores(&self, features: &Matrix) -> Result<Vec<f64>>;

    fn predict_labels(&self, features: &Matrix, threshold: f64) -> Result<Vec<Label>> {
        Ok(self
            .predict_scores(features)?
            .into_iter()
            .map(|s| Label::from_bool(s >= threshold))
            .collect())
    }
}

/// Fits a fresh classifier per training set.
pub trait ModelFactory: Send + Sync {
    fn name(&self) -> &str;
    fn fit(&self, train: &Dataset, seed: u64) -> Result<Box<dyn Classifier>>;
}

pub(crate) fn require_trainable(train: &Dataset) -> Result<()> {
    let c = train.class_counts();
    if c.positive == 0 || c.negative == 0 {
        return Err(Error::Data(format!(
            "training set must contain both classes, got {c}"
        )));
    }
    Ok(())
}

pub(crate) fn check_width(features: &Matrix, expected: usize) -> Result<()> {
    if features.cols() != expected {
        return Err(Error::Shape(format!(
            "model expects {expected} features, got {}",
            features.cols()
        )));
    }
    Ok(())
}
