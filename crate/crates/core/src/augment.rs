//! Autoencoder reconstructions as extra training rows.
//!
//! The autoencoder is `Dense(hidden, relu) -> Dense(d, sigmoid)` trained
//! with mean squared error on min-max scaled features. Each reconstructed row
//! keeps the label of its source row and is appended after every input row.

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Label, Provenance, TaggedDataset};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::nn::{self, Activation, AdamParams, LayerSpec, Loss, Network, NetworkSpec, Tensor};

/// Slack allowed around `[0, 1]` before input is treated as unscaled.
pub const SCALE_TOLERANCE: f64 = 0.01;

/// The `[autoencoder]` config section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AutoencoderConfig {
    pub hidden_dim: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    /// Final row count after augmentation; unset keeps every reconstruction.
    pub target_total: Option<usize>,
}

impl Default for AutoencoderConfig {
    fn default() -> Self {
        AutoencoderConfig {
            hidden_dim: 32,
            epochs: 200,
            batch_size: 32,
            lr: 0.001,
            target_total: None,
        }
    }
}

impl AutoencoderConfig {
    pub fn spec(&self, input_dim: usize, seed: u64) -> AutoencoderSpec {
        AutoencoderSpec {
            input_dim,
            hidden_dim: self.hidden_dim,
            epochs: self.epochs,
            batch_size: self.batch_size,
            lr: self.lr,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AutoencoderSpec {
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub seed: u64,
}

impl AutoencoderSpec {
    pub fn network_spec(&self) -> Result<NetworkSpec> {
        if self.hidden_dim == 0 || self.hidden_dim > self.input_dim {
            return Err(Error::Config(format!(
                "autoencoder hidden_dim must be in 1..={}, got {}",
                self.input_dim, self.hidden_dim
            )));
        }
        let spec = NetworkSpec {
            input_shape: vec![self.input_dim],
            layers: vec![
                LayerSpec::Dense {
                    units: self.hidden_dim,
                    l2: 0.0,
                    activation: Activation::Relu,
                },
                LayerSpec::Dense {
                    units: self.input_dim,
                    l2: 0.0,
                    activation: Activation::Sigmoid,
                },
            ],
            loss: Loss::MeanSquaredError,
            optimizer: AdamParams {
                lr: self.lr,
                ..AdamParams::default()
            },
            epochs: self.epochs,
            batch_size: self.batch_size,
            seed: self.seed,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone)]
pub struct Autoencoder {
    pub net: Network,
    pub loss_history: Vec<f64>,
    /// Mean squared reconstruction error over the training rows after the
    /// last epoch, evaluated without dropout or weight updates.
    pub final_mse: f64,
}

fn check_scaled(ds: &Dataset) -> Result<()> {
    let lo = -SCALE_TOLERANCE;
    let hi = 1.0 + SCALE_TOLERANCE;
    for (i, row) in ds.features().iter_rows().enumerate() {
        if let Some(j) = row.iter().position(|&v| v < lo || v > hi) {
            return Err(Error::Data(format!(
                "autoencoder input must be scaled to [0, 1]: row {i}, feature {:?} is {}",
                ds.feature_names()[j],
                row[j]
            )));
        }
    }
    Ok(())
}

fn as_tensor(m: &Matrix) -> Result<Tensor> {
    Tensor::new(vec![m.rows(), m.cols()], m.as_slice().to_vec())
}

pub fn train_autoencoder(ds: &Dataset, spec: &AutoencoderSpec) -> Result<Autoencoder> {
    if spec.input_dim != ds.n_features() {
        return Err(Error::Shape(format!(
            "autoencoder input_dim {} but dataset has {} features",
            spec.input_dim,
            ds.n_features()
        )));
    }
    check_scaled(ds)?;
    let mut net = Network::init(spec.network_spec()?)?;
    let x = as_tensor(ds.features())?;
    let report = nn::train(&mut net, &x, &x)?;
    let mut ae = Autoencoder {
        net,
        loss_history: report.loss_history,
        final_mse: 0.0,
    };
    let errors = ae.row_errors(ds.features())?;
    ae.final_mse = errors.iter().sum::<f64>() / errors.len() as f64;
    Ok(ae)
}

impl Autoencoder {
    pub fn input_dim(&self) -> usize {
        self.net.spec().input_shape[0]
    }

    pub fn reconstruct(&self, features: &Matrix) -> Result<Matrix> {
        if features.cols() != self.input_dim() {
            return Err(Error::Shape(format!(
                "autoencoder expects {} features, got {}",
                self.input_dim(),
                features.cols()
            )));
        }
        let out = self.net.predict(&as_tensor(features)?)?;
        Matrix::from_vec(features.rows(), features.cols(), out.into_data())
    }

    /// Per-row mean squared reconstruction error.
    pub fn row_errors(&self, features: &Matrix) -> Result<Vec<f64>> {
        let rec = self.reconstruct(features)?;
        let d = features.cols() as f64;
        Ok(features
            .iter_rows()
            .zip(rec.iter_rows())
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / d)
            .collect())
    }
}

/// How many reconstructions of each class to keep so that `keep` is split
/// in proportion to the class counts. Leftover units go to the larger
/// fractional remainder, then to the larger class, then to the positive class.
fn class_quota(pos: usize, neg: usize, keep: usize) -> (usize, usize) {
    let n = pos + neg;
    let qp = keep * pos / n;
    let qn = keep * neg / n;
    let mut left = keep - qp - qn;
    let (rp, rn) = (keep * pos % n, keep * neg % n);
    let positive_first = (rp, pos) >= (rn, neg);
    let (mut qp, mut qn) = (qp, qn);
    for turn in [positive_first, !positive_first] {
        if left > 0 {
            if turn {
                qp += 1;
            } else {
                qn += 1;
            }
            left -= 1;
        }
    }
    (qp, qn)
}

/// Appends reconstructions of `input` after its rows.
///
/// With `target_total = Some(t)`, only `t - n` reconstructions are kept:
/// within each class's quota, the rows with the largest reconstruction
/// error, ties broken by row index. Kept rows stay in source order.
pub fn augment(input: &TaggedDataset, ae: &Autoencoder, target_total: Option<usize>) -> Result<TaggedDataset> {
    let ds = &input.dataset;
    let n = ds.n_samples();
    let rec = ae.reconstruct(ds.features())?;
    let keep: Vec<usize> = match target_total {
        None => (0..n).collect(),
        Some(t) => {
            if t < n || t > 2 * n {
                return Err(Error::Config(format!(
                    "target_total {t} must lie between {n} and {}",
                    2 * n
                )));
            }
            let errors = ae.row_errors(ds.features())?;
            let counts = ds.class_counts();
            let (qp, qn) = class_quota(counts.positive, counts.negative, t - n);
            let mut chosen = Vec::with_capacity(t - n);
            for (label, quota) in [(Label::Positive, qp), (Label::Negative, qn)] {
                let mut rows: Vec<usize> = (0..n).filter(|&i| ds.labels()[i] == label).collect();
                rows.sort_by(|&a, &b| errors[b].total_cmp(&errors[a]).then(a.cmp(&b)));
                chosen.extend_from_slice(&rows[..quota]);
            }
            chosen.sort_unstable();
            chosen
        }
    };
    let rec = rec.select_rows(&keep);
    let labels: Vec<Label> = keep.iter().map(|&i| ds.labels()[i]).collect();
    let extra = Dataset::new(rec, labels, ds.feature_names().to_vec())?;
    let mut provenance = input.provenance.clone();
    provenance.extend(std::iter::repeat_n(Provenance::Reconstruction, keep.len()));
    TaggedDataset::new(ds.concat(&extra)?, provenance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Prng;

    fn random(n: usize, d: usize, seed: u64) -> Dataset {
        let mut rng = Prng::new(seed);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.uniform()).collect()).collect();
        let labels = (0..n).map(|i| Label::from_bool(i % 2 == 0)).collect();
        Dataset::new(Matrix::from_rows(&rows).unwrap(), labels, (0..d).map(|i| format!("f{i}")).collect()).unwrap()
    }

    fn quick(d: usize, hidden: usize) -> AutoencoderSpec {
        AutoencoderSpec { input_dim: d, hidden_dim: hidden, epochs: 30, batch_size: 8, lr: 0.01, seed: 5 }
    }

    #[test]
    fn reference_shapes() {
        let net = Network::init(AutoencoderConfig::default().spec(57, 0).network_spec().unwrap()).unwrap();
        let shapes: Vec<Vec<usize>> = net.param_info().into_iter().map(|p| p.shape).collect();
        assert_eq!(shapes, vec![vec![57, 32], vec![32], vec![32, 57], vec![57]]);
    }

    #[test]
    fn rejects_unscaled_input() {
        let mut ds = random(4, 3, 1);
        let (mut m, l, names) = ds.clone().into_parts();
        m.set(2, 1, 1.5);
        ds = Dataset::new(m, l, names).unwrap();
        let err = train_autoencoder(&ds, &quick(3, 2)).unwrap_err();
        assert!(err.to_string().contains("row 2"), "{err}");
    }

    #[test]
    fn reconstructions_in_unit_interval() {
        let ds = random(20, 5, 2);
        let ae = train_autoencoder(&ds, &quick(5, 3)).unwrap();
        let rec = ae.reconstruct(ds.features()).unwrap();
        assert_eq!((rec.rows(), rec.cols()), (20, 5));
        assert!(rec.as_slice().iter().all(|&v| v > 0.0 && v < 1.0));
        assert!(ae.reconstruct(&Matrix::zeros(2, 4)).is_err());
    }

    #[test]
    fn keep_all_doubles_and_copies_labels() {
        let ds = random(12, 4, 3);
        let ae = train_autoencoder(&ds, &quick(4, 2)).unwrap();
        let out = augment(&TaggedDataset::all_original(ds.clone()), &ae, None).unwrap();
        assert_eq!(out.dataset.n_samples(), 24);
        assert_eq!(out.count(Provenance::Reconstruction), 12);
        assert_eq!(&out.dataset.labels()[12..], ds.labels());
        assert_eq!(out.dataset.subset(&(0..12).collect::<Vec<_>>()), ds);
    }

    #[test]
    fn target_total_keeps_largest_errors_per_class() {
        let ds = random(10, 4, 4);
        let ae = train_autoencoder(&ds, &quick(4, 2)).unwrap();
        let out = augment(&TaggedDataset::all_original(ds.clone()), &ae, Some(14)).unwrap();
        assert_eq!(out.dataset.n_samples(), 14);
        let c = out.dataset.class_counts();
        assert_eq!((c.positive, c.negative), (7, 7));
        let errors = ae.row_errors(ds.features()).unwrap();
        for label in [Label::Positive, Label::Negative] {
            let mut rows: Vec<usize> = (0..10).filter(|&i| ds.labels()[i] == label).collect();
            rows.sort_by(|&a, &b| errors[b].total_cmp(&errors[a]).then(a.cmp(&b)));
            let rec = ae.reconstruct(&ds.features().select_rows(&rows[..2])).unwrap();
            for r in rec.iter_rows() {
                assert!(out.dataset.features().iter_rows().skip(10).any(|o| o == r));
            }
        }
        assert!(augment(&TaggedDataset::all_original(ds.clone()), &ae, Some(9)).is_err());
        assert!(augment(&TaggedDataset::all_original(ds), &ae, Some(21)).is_err());
    }

    #[test]
    fn quota_splits_proportionally() {
        assert_eq!(class_quota(216, 216, 394), (197, 197));
        assert_eq!(class_quota(216, 216, 395), (198, 197));
        assert_eq!(class_quota(3, 1, 2), (2, 0));
        assert_eq!(class_quota(1, 3, 3), (1, 2));
    }

    #[test]
    fn constant_rows_are_learned() {
        let rows = vec![vec![0.2, 0.7, 0.5]; 432];
        let labels = (0..432).map(|i| Label::from_bool(i % 2 == 0)).collect();
        let ds = Dataset::new(Matrix::from_rows(&rows).unwrap(), labels, vec!["a".into(), "b".into(), "c".into()]).unwrap();
        let spec = AutoencoderConfig::default().spec(3, 7);
        let ae = train_autoencoder(&ds, &AutoencoderSpec { hidden_dim: 2, ..spec }).unwrap();
        assert!(ae.final_mse < 1e-3, "{}", ae.final_mse);
    }

    #[test]
    fn deterministic() {
        let ds = random(10, 3, 8);
        let a = train_autoencoder(&ds, &quick(3, 2)).unwrap();
        let b = train_autoencoder(&ds, &quick(3, 2)).unwrap();
        assert_eq!(a.loss_history, b.loss_history);
        assert_eq!(a.net.params(), b.net.params());
    }
}
