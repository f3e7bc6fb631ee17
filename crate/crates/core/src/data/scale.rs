use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Per-feature `(min, max)` observed on the fitting data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl ScalingParams {
    pub fn len(&self) -> usize {
        self.min.len()
    }

    pub fn is_empty(&self) -> bool {
        self.min.is_empty()
    }

    fn check(&self, n_features: usize) -> Result<()> {
        if self.min.len() != n_features || self.max.len() != n_features {
            return Err(Error::Shape(format!(
                "scaling parameters cover {} features, dataset has {n_features}",
                self.min.len()
            )));
        }
        Ok(())
    }
}

pub fn fit_scaler(ds: &Dataset) -> Result<ScalingParams> {
    if ds.n_samples() == 0 {
        return Err(Error::Data("cannot fit a scaler on an empty dataset".into()));
    }
    let d = ds.n_features();
    let mut min = vec![f64::INFINITY; d];
    let mut max = vec![f64::NEG_INFINITY; d];
    for row in ds.features().iter_rows() {
        for (j, &v) in row.iter().enumerate() {
            min[j] = min[j].min(v);
            max[j] = max[j].max(v);
        }
    }
    Ok(ScalingParams { min, max })
}

/// Maps each feature to `(x - min) / (max - min)`; a feature with
/// `min == max` maps to 0.
pub fn apply_scaler(ds: &Dataset, p: &ScalingParams) -> Result<Dataset> {
    p.check(ds.n_features())?;
    let src = ds.features();
    let mut out = Matrix::zeros(src.rows(), src.cols());
    for i in 0..src.rows() {
        for (j, (v, o)) in src.row(i).iter().zip(out.row_mut(i)).enumerate() {
            let span = p.max[j] - p.min[j];
            *o = if span > 0.0 { (v - p.min[j]) / span } else { 0.0 };
        }
    }
    Dataset::new(out, ds.labels().to_vec(), ds.feature_names().to_vec())
}

/// Inverse of [`apply_scaler`]. Constant features come back as their `min`.
pub fn invert_scaler(ds: &Dataset, p: &ScalingParams) -> Result<Dataset> {
    p.check(ds.n_features())?;
    let src = ds.features();
    let mut out = Matrix::zeros(src.rows(), src.cols());
    for i in 0..src.rows() {
        for (j, (v, o)) in src.row(i).iter().zip(out.row_mut(i)).enumerate() {
            *o = p.min[j] + v * (p.max[j] - p.min[j]);
        }
    }
    Dataset::new(out, ds.labels().to_vec(), ds.feature_names().to_vec())
}
