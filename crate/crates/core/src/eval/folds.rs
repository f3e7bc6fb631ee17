use serde::{Deserialize, Serialize};

use crate::data::Label;
use crate::error::{Error, Result};
use crate::rng::{stream, Prng};

/// A partition of `0..n` into `k` test folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub stratified: bool,
    /// Row indices of each test fold, ascending.
    pub folds: Vec<Vec<usize>>,
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::Config(format!("k must be at least 2, got {k}")));
    }
    if k > n {
        return Err(Error::Config(format!("k = {k} exceeds the {n} available rows")));
    }
    Ok(())
}

/// Shuffles `0..n` and cuts it into `k` contiguous chunks. The first
/// `n % k` folds get one extra row.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<FoldPlan> {
    check_k(n, k)?;
    let order = Prng::with_stream(seed, stream::FOLDS).permutation(n);
    let (base, extra) = (n / k, n % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        let mut fold = order[start..start + len].to_vec();
        fold.sort_unstable();
        folds.push(fold);
        start += len;
    }
    Ok(FoldPlan { k, seed, stratified: false, folds })
}

/// Shuffles each class separately, lists positives then negatives, and
/// deals the list round-robin, so every fold gets a near-proportional share
/// of each class and fold sizes differ by at most one.
pub fn stratified_kfold_split(labels: &[Label], k: usize, seed: u64) -> Result<FoldPlan> {
    let n = labels.len();
    check_k(n, k)?;
    let mut rng = Prng::with_stream(seed, stream::FOLDS);
    let mut order = Vec::with_capacity(n);
    for class in [Label::Positive, Label::Negative] {
        let mut idx: Vec<usize> = (0..n).filter(|&i| labels[i] == class).collect();
        rng.shuffle(&mut idx);
        order.extend(idx);
    }
    let mut folds = vec![Vec::with_capacity(n / k + 1); k];
    for (i, row) in order.into_iter().enumerate() {
        folds[i % k].push(row);
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    Ok(FoldPlan { k, seed, stratified: true, folds })
}

impl FoldPlan {
    pub fn n(&self) -> usize {
        self.folds.iter().map(Vec::len).sum()
    }

    /// Checks that the folds are disjoint, cover `0..n` and differ in size
    /// by at most one.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.folds.len() != self.k {
            return Err(Error::Integrity(format!("plan has {} folds, expected {}", self.folds.len(), self.k)));
        }
        let mut seen = vec![false; n];
        for (f, fold) in self.folds.iter().enumerate() {
            for &i in fold {
                if i >= n {
                    return Err(Error::Integrity(format!("fold {f} holds row {i}, dataset has {n}")));
                }
                if std::mem::replace(&mut seen[i], true) {
                    return Err(Error::Integrity(format!("row {i} appears in more than one fold")));
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::Integrity(format!("row {i} is in no fold")));
        }
        let sizes = self.folds.iter().map(Vec::len);
        let (lo, hi) = (sizes.clone().min().unwrap_or(0), sizes.max().unwrap_or(0));
        if hi - lo > 1 {
            return Err(Error::Integrity(format!("fold sizes range from {lo} to {hi}")));
        }
        Ok(())
    }

    /// Training rows for fold `f`: every row outside it, ascending.
    pub fn train_indices(&self, f: usize) -> Vec<usize> {
        let n = self.n();
        let mut in_test = vec![false; n];
        for &i in &self.folds[f] {
            in_test[i] = true;
        }
        (0..n).filter(|&i| !in_test[i]).collect()
    }
}
