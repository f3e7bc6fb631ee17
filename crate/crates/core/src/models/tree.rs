//! CART classification trees with Gini impurity.
//!
//! Text format, one node per line after the header, node `i` on line `i + 1`:
//!
//! ```text
//! cadpipe-tree 1 <n_features> <n_nodes>
//! split <feature> <threshold> <left> <right>
//! leaf <score> <samples>
//! ```
//!
//! A row goes left when `x[feature] <= threshold`. Leaf scores are the
//! positive fraction of the training rows that reached the leaf.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{check_width, require_trainable, Classifier, ModelFactory};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::Prng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitCriterion {
    #[default]
    Gini,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TreeConfig {
    /// 0 means unlimited.
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub criterion: SplitCriterion,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            max_depth: 12,
            min_samples_split: 2,
            criterion: SplitCriterion::Gini,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Leaf { score: f64, samples: usize },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    n_features: usize,
    nodes: Vec<TreeNode>,
}

/// `1 - p^2 - (1 - p)^2` for `positives` out of `total`.
pub fn gini(positives: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let p = positives as f64 / total as f64;
    1.0 - p * p - (1.0 - p) * (1.0 - p)
}

struct Builder<'a> {
    x: &'a Matrix,
    y: &'a [bool],
    cfg: &'a TreeConfig,
    /// Per-split feature subsampling: generator and subset size.
    sampler: Option<(Prng, usize)>,
    nodes: Vec<TreeNode>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

impl Builder<'_> {
    fn candidate_features(&mut self) -> Vec<usize> {
        let d = self.x.cols();
        match &mut self.sampler {
            Some((rng, k)) if *k < d => {
                let mut all: Vec<usize> = (0..d).collect();
                for i in 0..*k {
                    let j = i + rng.below(d - i);
                    all.swap(i, j);
                }
                all.truncate(*k);
                all.sort_unstable();
                all
            }
            _ => (0..d).collect(),
        }
    }

    fn best_split(&self, idx: &[usize], features: &[usize]) -> Option<BestSplit> {
        let n = idx.len();
        let total_pos = idx.iter().filter(|&&i| self.y[i]).count();
        let mut best: Option<BestSplit> = None;
        let mut pairs: Vec<(f64, bool)> = Vec::with_capacity(n);
        for &f in features {
            pairs.clear();
            pairs.extend(idx.iter().map(|&i| (self.x.get(i, f), self.y[i])));
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut left_pos = 0;
            for p in 0..n - 1 {
                left_pos += usize::from(pairs[p].1);
                let (a, b) = (pairs[p].0, pairs[p + 1].0);
                if a == b {
                    continue;
                }
                let nl = p + 1;
                let nr = n - nl;
                let impurity = (nl as f64 * gini(left_pos, nl)
                    + nr as f64 * gini(total_pos - left_pos, nr))
                    / n as f64;
                if best.as_ref().is_none_or(|b| impurity < b.impurity) {
                    let mid = a + (b - a) / 2.0;
                    best = Some(BestSplit {
                        feature: f,
                        threshold: if mid < b { mid } else { a },
                        impurity,
                    });
                }
            }
        }
        best
    }

    fn grow(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let positives = idx.iter().filter(|&&i| self.y[i]).count();
        let id = self.nodes.len();
        self.nodes.push(TreeNode::Leaf {
            score: positives as f64 / idx.len().max(1) as f64,
            samples: idx.len(),
        });
        let pure = positives == 0 || positives == idx.len();
        let depth_ok = self.cfg.max_depth == 0 || depth < self.cfg.max_depth;
        if pure || !depth_ok || idx.len() < self.cfg.min_samples_split.max(2) {
            return id;
        }
        let features = self.candidate_features();
        let split = self.best_split(&idx, &features).or_else(|| {
            if features.len() < self.x.cols() {
                let all: Vec<usize> = (0..self.x.cols()).collect();
                self.best_split(&idx, &all)
            } else {
                None
            }
        });
        let Some(split) = split else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = idx
            .into_iter()
            .partition(|&i| self.x.get(i, split.feature) <= split.threshold);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        id
    }
}

impl DecisionTree {
    pub fn fit(train: &Dataset, cfg: &TreeConfig) -> Result<Self> {
        require_trainable(train)?;
        let y: Vec<bool> = train.labels().iter().map(|l| l.is_positive()).collect();
        Ok(Self::fit_rows(
            train.features(),
            &y,
            (0..train.n_samples()).collect(),
            cfg,
            None,
        ))
    }

    /// Grows a tree on the rows `idx` (repeats allowed). With a sampler,
    /// each split considers a fresh random subset of the features.
    pub(crate) fn fit_rows(
        x: &Matrix,
        y: &[bool],
        idx: Vec<usize>,
        cfg: &TreeConfig,
        sampler: Option<(Prng, usize)>,
    ) -> Self {
        let mut b = Builder {
            x,
            y,
            cfg,
            sampler,
            nodes: Vec::new(),
        };
        b.grow(idx, 0);
        DecisionTree {
            n_features: x.cols(),
            nodes: b.nodes,
        }
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], i: usize) -> usize {
            match nodes[i] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn score_row(&self, row: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                TreeNode::Leaf { score, .. } => return score,
                TreeNode::Split { feature, threshold, left, right } => {
                    i = if row[feature] <= threshold { left } else { right };
                }
            }
        }
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("cadpipe-tree 1 {} {}\n", self.n_features, self.nodes.len());
        for node in &self.nodes {
            let _ = match node {
                TreeNode::Leaf { score, samples } => writeln!(out, "leaf {score} {samples}"),
                TreeNode::Split { feature, threshold, left, right } => {
                    writeln!(out, "split {feature} {threshold} {left} {right}")
                }
            };
        }
        out
    }

    /// Parses one tree from the front of `lines`.
    pub(crate) fn from_lines<'a>(lines: &mut impl Iterator<Item = &'a str>) -> Result<Self> {
        let bad = |msg: String| Error::Parse(format!("tree: {msg}"));
        let header = lines.next().ok_or_else(|| bad("missing header".into()))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        let (n_features, n_nodes) = match parts.as_slice() {
            ["cadpipe-tree", "1", f, n] => (
                f.parse::<usize>().map_err(|_| bad(format!("bad header {header:?}")))?,
                n.parse::<usize>().map_err(|_| bad(format!("bad header {header:?}")))?,
            ),
            _ => return Err(bad(format!("bad header {header:?}"))),
        };
        let mut nodes = Vec::with_capacity(n_nodes);
        for i in 0..n_nodes {
            let line = lines.next().ok_or_else(|| bad(format!("missing node {i}")))?;
            let f: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("node {i}: {line:?}")));
            let int = |s: &str| s.parse::<usize>().map_err(|_| bad(format!("node {i}: {line:?}")));
            let node = match f.as_slice() {
                ["leaf", score, samples] => TreeNode::Leaf { score: num(score)?, samples: int(samples)? },
                ["split", feat, thr, l, r] => {
                    let (feature, left, right) = (int(feat)?, int(l)?, int(r)?);
                    if feature >= n_features || left >= n_nodes || right >= n_nodes || left <= i || right <= i {
                        return Err(bad(format!("node {i} references out of range: {line:?}")));
                    }
                    TreeNode::Split { feature, threshold: num(thr)?, left, right }
                }
                _ => return Err(bad(format!("node {i}: {line:?}"))),
            };
            nodes.push(node);
        }
        if nodes.is_empty() {
            return Err(bad("no nodes".into()));
        }
        Ok(DecisionTree { n_features, nodes })
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Self::from_lines(&mut text.lines())
    }
}

impl Classifier for DecisionTree {
    fn predict_scores(&self, features: &Matrix) -> Result<Vec<f64>> {
        check_width(features, self.n_features)?;
        Ok(features.iter_rows().map(|r| self.score_row(r)).collect())
    }
}

impl ModelFactory for TreeConfig {
    fn name(&self) -> &str {
        "tree"
    }

    fn fit(&self, train: &Dataset, _seed: u64) -> Result<Box<dyn Classifier>> {
        Ok(Box::new(DecisionTree::fit(train, self)?))
    }
}
