use serde::{Deserialize, Serialize};

use crate::data::Label;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    /// The same counts with the roles of the two classes swapped.
    pub fn flipped(&self) -> Self {
        ConfusionCounts { tp: self.tn, fp: self.fn_, tn: self.tp, fn_: self.fp }
    }
}

pub fn confusion(labels: &[Label], predictions: &[Label]) -> Result<ConfusionCounts> {
    if labels.len() != predictions.len() {
        return Err(Error::Shape(format!(
            "{} labels but {} predictions",
            labels.len(),
            predictions.len()
        )));
    }
    let mut c = ConfusionCounts::default();
    for (&t, &p) in labels.iter().zip(predictions) {
        match (t.is_positive(), p.is_positive()) {
            (true, true) => c.tp += 1,
            (false, true) => c.fp += 1,
            (false, false) => c.tn += 1,
            (true, false) => c.fn_ += 1,
        }
    }
    Ok(c)
}

/// Positive-class metrics. Any 0/0 ratio is reported as 0 and named in
/// `undefined`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Metrics {
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
    pub accuracy: f64,
    pub undefined: Vec<String>,
}

fn ratio(num: usize, den: usize, name: &str, undefined: &mut Vec<String>) -> f64 {
    if den == 0 {
        undefined.push(name.to_string());
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn metrics(c: &ConfusionCounts) -> Metrics {
    let mut undefined = Vec::new();
    let recall = ratio(c.tp, c.tp + c.fn_, "recall", &mut undefined);
    let precision = ratio(c.tp, c.tp + c.fp, "precision", &mut undefined);
    let accuracy = ratio(c.tp + c.tn, c.total(), "accuracy", &mut undefined);
    let f1 = if precision + recall == 0.0 {
        undefined.push("f1".into());
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Metrics { recall, precision, f1, accuracy, undefined }
}

/// Rank-based area under the ROC curve: the probability that a random
/// positive outscores a random negative, ties counting one half.
///
/// Ranks are kept doubled as integers so the result is a single rounding
/// of `(2 * wins + ties) / (2 * P * N)`.
pub fn roc_auc(scores: &[f64], labels: &[Label]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::Shape(format!("{} scores but {} labels", scores.len(), labels.len())));
    }
    if let Some(i) = scores.iter().position(|s| s.is_nan()) {
        return Err(Error::NonFinite { location: format!("score {i}") });
    }
    let p = labels.iter().filter(|l| l.is_positive()).count() as u64;
    let n = labels.len() as u64 - p;
    if p == 0 || n == 0 {
        return Err(Error::Data("ROC AUC needs both classes".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut doubled_rank_sum: u64 = 0;
    let mut s = 0;
    while s < order.len() {
        let mut e = s + 1;
        while e < order.len() && scores[order[e]] == scores[order[s]] {
            e += 1;
        }
        // Mean 1-based rank of positions s..e is (s + 1 + e) / 2.
        let doubled = (s + 1 + e) as u64;
        let pos_in_group = order[s..e].iter().filter(|&&i| labels[i].is_positive()).count() as u64;
        doubled_rank_sum += doubled * pos_in_group;
        s = e;
    }
    let numerator = doubled_rank_sum - p * (p + 1);
    Ok(numerator as f64 / (2 * p * n) as f64)
}
