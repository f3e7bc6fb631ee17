//! Dataset ingestion: CSV parsing, schema-driven encoding, constant-column
//! removal, min-max scaling and the columnar text format every pipeline stage
//! reads and writes.

mod encode;
mod format;
mod scale;
mod schema;
mod summary;
mod table;

pub use encode::encode;
pub use format::{read_dataset, read_tagged, write_dataset, write_tagged, LABEL_COLUMN, PROVENANCE_COLUMN};
pub use scale::{apply_scaler, fit_scaler, invert_scaler, ScalingParams};
pub use schema::{DatasetSchema, FeatureKind, FeatureSpec};
pub use summary::{feature_summary, render_summary, FeatureSummary};
pub use table::{parse_csv, remove_constant_columns, CleanedTable, RawTable};

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub fn from_bool(positive: bool) -> Self {
        if positive {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }

    /// 1.0 for positive, 0.0 for negative.
    pub fn as_target(self) -> f64 {
        if self.is_positive() {
            1.0
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ClassCounts {
    pub positive: usize,
    pub negative: usize,
}

impl ClassCounts {
    pub fn of(labels: &[Label]) -> Self {
        let positive = labels.iter().filter(|l| l.is_positive()).count();
        ClassCounts {
            positive,
            negative: labels.len() - positive,
        }
    }

    pub fn total(&self) -> usize {
        self.positive + self.negative
    }

    /// The less frequent class; positive wins a tie.
    pub fn minority(&self) -> Label {
        if self.negative < self.positive {
            Label::Negative
        } else {
            Label::Positive
        }
    }

    pub fn get(&self, label: Label) -> usize {
        match label {
            Label::Positive => self.positive,
            Label::Negative => self.negative,
        }
    }
}

impl fmt::Display for ClassCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "positive={} negative={}", self.positive, self.negative)
    }
}

/// Row origin of a sample in a balanced or augmented dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Original,
    SyntheticSmote,
    Reconstruction,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Original => "original",
            Provenance::SyntheticSmote => "synthetic_smote",
            Provenance::Reconstruction => "reconstruction",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "original" => Ok(Provenance::Original),
            "synthetic_smote" => Ok(Provenance::SyntheticSmote),
            "reconstruction" => Ok(Provenance::Reconstruction),
            other => Err(Error::Parse(format!("unknown provenance tag {other:?}"))),
        }
    }
}

/// Numeric feature matrix with binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Matrix,
    labels: Vec<Label>,
    feature_names: Vec<String>,
}

impl Dataset {
    pub fn new(features: Matrix, labels: Vec<Label>, feature_names: Vec<String>) -> Result<Self> {
        if labels.len() != features.rows() {
            return Err(Error::Shape(format!(
                "{} labels for {} samples",
                labels.len(),
                features.rows()
            )));
        }
        if feature_names.len() != features.cols() {
            return Err(Error::Shape(format!(
                "{} feature names for {} features",
                feature_names.len(),
                features.cols()
            )));
        }
        let mut seen = HashSet::new();
        for name in &feature_names {
            if name.is_empty() {
                return Err(Error::Data("empty feature name".into()));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::Data(format!("duplicate feature name {name:?}")));
            }
        }
        if let Some(pos) = features.as_slice().iter().position(|v| !v.is_finite()) {
            let cols = features.cols().max(1);
            return Err(Error::Data(format!(
                "non-finite value at row {}, column {:?}",
                pos / cols,
                feature_names[pos % cols]
            )));
        }
        Ok(Dataset {
            features,
            labels,
            feature_names,
        })
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn class_counts(&self) -> ClassCounts {
        ClassCounts::of(&self.labels)
    }

    pub fn require_both_classes(&self) -> Result<()> {
        let c = self.class_counts();
        if c.positive == 0 || c.negative == 0 {
            return Err(Error::Data(format!(
                "both classes must be present, got {c}"
            )));
        }
        Ok(())
    }

    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select_rows(idx),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
        }
    }

    /// Rows of `self` followed by rows of `other`; feature names must agree.
    pub fn concat(&self, other: &Dataset) -> Result<Dataset> {
        if self.feature_names != other.feature_names {
            return Err(Error::Shape("cannot concatenate datasets with different features".into()));
        }
        let mut features = self.features.clone();
        for row in other.features.iter_rows() {
            features.push_row(row)?;
        }
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        Ok(Dataset {
            features,
            labels,
            feature_names: self.feature_names.clone(),
        })
    }

    pub fn into_parts(self) -> (Matrix, Vec<Label>, Vec<String>) {
        (self.features, self.labels, self.feature_names)
    }
}

/// A dataset whose rows carry a [`Provenance`] tag.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedDataset {
    pub dataset: Dataset,
    pub provenance: Vec<Provenance>,
}

impl TaggedDataset {
    pub fn new(dataset: Dataset, provenance: Vec<Provenance>) -> Result<Self> {
        if provenance.len() != dataset.n_samples() {
            return Err(Error::Shape(format!(
                "{} provenance tags for {} samples",
                provenance.len(),
                dataset.n_samples()
            )));
        }
        Ok(TaggedDataset {
            dataset,
            provenance,
        })
    }

    pub fn all_original(dataset: Dataset) -> Self {
        let provenance = vec![Provenance::Original; dataset.n_samples()];
        TaggedDataset {
            dataset,
            provenance,
        }
    }

    pub fn count(&self, tag: Provenance) -> usize {
        self.provenance.iter().filter(|&&p| p == tag).count()
    }
}
