//! Bagged CART ensembles.
//!
//! Text format: a `cadpipe-forest 1 <n_trees>` header followed by each tree
//! in the [`DecisionTree`](super::DecisionTree) text format.

use serde::{Deserialize, Serialize};

use super::tree::{DecisionTree, SplitCriterion, TreeConfig};
use super::{check_width, require_trainable, Classifier, ModelFactory};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::{stream, Prng};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// Features tried per split; 0 means `floor(sqrt(d))`.
    pub max_features: usize,
    pub bootstrap: bool,
    /// 0 means unlimited.
    pub max_depth: usize,
    pub min_samples_split: usize,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 100,
            max_features: 0,
            bootstrap: true,
            max_depth: 0,
            min_samples_split: 2,
        }
    }
}

impl ForestConfig {
    pub fn features_per_split(&self, d: usize) -> usize {
        if self.max_features == 0 {
            ((d as f64).sqrt().floor() as usize).max(1)
        } else {
            self.max_features.min(d)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Forest {
    pub trees: Vec<DecisionTree>,
}

impl Forest {
    /// Tree `t` draws its bootstrap rows and split features from its own
    /// streams of `seed`, so the ensemble does not depend on fitting order.
    pub fn fit(train: &Dataset, cfg: &ForestConfig, seed: u64) -> Result<Self> {
        require_trainable(train)?;
        if cfg.n_trees == 0 {
            return Err(Error::Config("forest needs at least one tree".into()));
        }
        let n = train.n_samples();
        let y: Vec<bool> = train.labels().iter().map(|l| l.is_positive()).collect();
        let tree_cfg = TreeConfig {
            max_depth: cfg.max_depth,
            min_samples_split: cfg.min_samples_split,
            criterion: SplitCriterion::Gini,
        };
        let k = cfg.features_per_split(train.n_features());
        let trees = (0..cfg.n_trees as u64)
            .map(|t| {
                let idx = if cfg.bootstrap {
                    let mut rng = Prng::with_stream(seed, (t << 8) | stream::BOOTSTRAP);
                    (0..n).map(|_| rng.below(n)).collect()
                } else {
                    (0..n).collect()
                };
                let sampler = Prng::with_stream(seed, (t << 8) | stream::FEATURES);
                DecisionTree::fit_rows(train.features(), &y, idx, &tree_cfg, Some((sampler, k)))
            })
            .collect();
        Ok(Forest { trees })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("cadpipe-forest 1 {}\n", self.trees.len());
        for t in &self.trees {
            out.push_str(&t.to_text());
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().unwrap_or_default();
        let n: usize = header
            .strip_prefix("cadpipe-forest 1 ")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad forest header {header:?}")))?;
        let trees = (0..n)
            .map(|_| DecisionTree::from_lines(&mut lines))
            .collect::<Result<Vec<_>>>()?;
        Ok(Forest { trees })
    }
}

impl Classifier for Forest {
    fn predict_scores(&self, features: &Matrix) -> Result<Vec<f64>> {
        check_width(features, self.trees[0].n_features())?;
        let m = self.trees.len() as f64;
        Ok(features
            .iter_rows()
            .map(|r| self.trees.iter().map(|t| t.score_row(r)).sum::<f64>() / m)
            .collect())
    }
}

impl ModelFactory for ForestConfig {
    fn name(&self) -> &str {
        "forest"
    }

    fn fit(&self, train: &Dataset, seed: u64) -> Result<Box<dyn Classifier>> {
        Ok(Box::new(Forest::fit(train, self, seed)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Label;

    fn noisy(n: usize) -> Dataset {
        let mut rng = Prng::new(17);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..4).map(|_| rng.uniform()).collect()).collect();
        let labels = rows
            .iter()
            .map(|r| Label::from_bool(r[0] + 0.5 * r[1] + 0.2 * rng.uniform() > 0.85))
            .collect();
        Dataset::new(Matrix::from_rows(&rows).unwrap(), labels, (0..4).map(|i| format!("f{i}")).collect()).unwrap()
    }

    #[test]
    fn single_unbagged_tree_matches_plain_tree() {
        let ds = noisy(60);
        let cfg = ForestConfig { n_trees: 1, bootstrap: false, max_features: 4, max_depth: 0, min_samples_split: 2 };
        let forest = Forest::fit(&ds, &cfg, 3).unwrap();
        let tree = DecisionTree::fit(&ds, &TreeConfig { max_depth: 0, ..Default::default() }).unwrap();
        assert_eq!(
            forest.predict_scores(ds.features()).unwrap(),
            tree.predict_scores(ds.features()).unwrap()
        );
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let ds = noisy(80);
        let cfg = ForestConfig { n_trees: 10, ..Default::default() };
        let a = Forest::fit(&ds, &cfg, 1).unwrap();
        let b = Forest::fit(&ds, &cfg, 1).unwrap();
        let c = Forest::fit(&ds, &cfg, 2).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn sqrt_feature_count() {
        let cfg = ForestConfig::default();
        assert_eq!(cfg.features_per_split(57), 7);
        assert_eq!(cfg.features_per_split(1), 1);
    }

    #[test]
    fn text_round_trip() {
        let ds = noisy(40);
        let f = Forest::fit(&ds, &ForestConfig { n_trees: 3, ..Default::default() }, 9).unwrap();
        assert_eq!(Forest::from_text(&f.to_text()).unwrap(), f);
    }
}
