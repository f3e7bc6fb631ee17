//! Borderline-SMOTE (variant 1).
//!
//! Each minority sample is classified by the share of majority points among
//! its `m` nearest neighbours in the whole dataset: all majority is noise, at
//! least half (but not all) is danger, fewer than half is safe. Synthetic
//! samples are interpolated from danger points toward one of their `k`
//! nearest minority neighbours until both classes have the same size.

use serde::{Deserialize, Serialize};

use super::NeighborIndex;
use crate::data::{Dataset, Label, Provenance, TaggedDataset};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::{stream, Prng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SmoteVariant {
    #[default]
    Borderline1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SmoteTarget {
    #[default]
    Equalize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmoteConfig {
    /// Neighbourhood size for danger detection.
    pub m_neighbors: usize,
    /// Minority neighbours considered as interpolation partners.
    pub k_neighbors: usize,
    pub variant: SmoteVariant,
    pub target: SmoteTarget,
    pub seed: u64,
}

impl Default for SmoteConfig {
    fn default() -> Self {
        SmoteConfig {
            m_neighbors: 5,
            k_neighbors: 5,
            variant: SmoteVariant::Borderline1,
            target: SmoteTarget::Equalize,
            seed: 0,
        }
    }
}

impl SmoteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m_neighbors == 0 || self.k_neighbors == 0 {
            return Err(Error::Config("smote neighbor counts must be at least 1".into()));
        }
        Ok(())
    }
}

/// Safe / danger / noise split of the minority class. Entries are positions
/// in `minority`, which lists the minority rows of the dataset in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinorityPartition {
    pub minority_label: Label,
    pub minority: Vec<usize>,
    pub safe: Vec<usize>,
    pub danger: Vec<usize>,
    pub noise: Vec<usize>,
}

pub fn partition_minority(ds: &Dataset, cfg: &SmoteConfig) -> Result<MinorityPartition> {
    cfg.validate()?;
    let counts = ds.class_counts();
    let minority_label = counts.minority();
    let minority: Vec<usize> = (0..ds.n_samples())
        .filter(|&i| ds.labels()[i] == minority_label)
        .collect();
    if minority.is_empty() || counts.get(minority_label) == ds.n_samples() {
        return Err(Error::Data(format!(
            "borderline partition needs both classes, got {counts}"
        )));
    }
    let m = cfg.m_neighbors;
    if m > ds.n_samples() - 1 {
        return Err(Error::Data(format!(
            "m_neighbors = {m} exceeds the {} other samples",
            ds.n_samples() - 1
        )));
    }
    let index = NeighborIndex::new(ds.features().clone())?;
    let mut part = MinorityPartition {
        minority_label,
        minority: minority.clone(),
        safe: Vec::new(),
        danger: Vec::new(),
        noise: Vec::new(),
    };
    for (pos, &row) in minority.iter().enumerate() {
        let majority_neighbors = index
            .query_member(row, m)?
            .into_iter()
            .filter(|&j| ds.labels()[j] != minority_label)
            .count();
        if majority_neighbors == m {
            part.noise.push(pos);
        } else if 2 * majority_neighbors >= m {
            part.danger.push(pos);
        } else {
            part.safe.push(pos);
        }
    }
    Ok(part)
}

/// How one synthetic row was made: `base + r * (partner - base)`, with both
/// indices referring to rows of the input dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticOrigin {
    pub base: usize,
    pub partner: usize,
    pub r: f64,
}

#[derive(Debug, Clone)]
pub struct SmoteOutcome {
    /// Input rows unchanged and in order, followed by the synthetic rows.
    pub dataset: Dataset,
    pub origins: Vec<SyntheticOrigin>,
    pub partition: Option<MinorityPartition>,
    /// The danger set was empty and every minority sample served as a base.
    pub used_plain_smote: bool,
    /// `k_neighbors` after clamping to the minority size.
    pub effective_k: usize,
}

impl SmoteOutcome {
    pub fn n_original(&self) -> usize {
        self.dataset.n_samples() - self.origins.len()
    }

    pub fn tagged(&self) -> TaggedDataset {
        let mut provenance = vec![Provenance::Original; self.n_original()];
        provenance.resize(self.dataset.n_samples(), Provenance::SyntheticSmote);
        TaggedDataset {
            dataset: self.dataset.clone(),
            provenance,
        }
    }
}

/// Oversamples the minority class until both classes are the same size.
///
/// The deficit is spread round-robin over the danger set in index order. For
/// each synthetic row the seeded stream yields first the partner slot (uniform
/// over the base point's `k` minority neighbours) and then `r` in `[0, 1)`.
pub fn borderline_smote(ds: &Dataset, cfg: &SmoteConfig) -> Result<SmoteOutcome> {
    cfg.validate()?;
    let counts = ds.class_counts();
    if counts.positive == counts.negative {
        return Ok(SmoteOutcome {
            dataset: ds.clone(),
            origins: Vec::new(),
            partition: None,
            used_plain_smote: false,
            effective_k: 0,
        });
    }
    let partition = partition_minority(ds, cfg)?;
    let n_min = partition.minority.len();
    if n_min < 2 {
        return Err(Error::Data(
            "minority class needs at least 2 samples to interpolate".into(),
        ));
    }
    let effective_k = cfg.k_neighbors.min(n_min - 1);
    if effective_k < cfg.k_neighbors {
        log::warn!("k_neighbors clamped from {} to {effective_k}", cfg.k_neighbors);
    }

    let used_plain_smote = partition.danger.is_empty();
    let bases: Vec<usize> = if used_plain_smote {
        log::warn!("empty danger set; synthesizing from every minority sample");
        (0..n_min).collect()
    } else {
        partition.danger.clone()
    };

    let minority_index = NeighborIndex::new(ds.features().select_rows(&partition.minority))?;
    let neighbors: Vec<Vec<usize>> = bases
        .iter()
        .map(|&b| minority_index.query_member(b, effective_k))
        .collect::<Result<_>>()?;

    let deficit = counts.total() - 2 * n_min;
    let mut rng = Prng::with_stream(cfg.seed, stream::SMOTE);
    let mut synthetic = Matrix::zeros(0, ds.n_features());
    let mut origins = Vec::with_capacity(deficit);
    let mut row = vec![0.0; ds.n_features()];
    for j in 0..deficit {
        let slot = j % bases.len();
        let partner_pos = neighbors[slot][rng.below(effective_k)];
        let r = rng.uniform();
        let base = partition.minority[bases[slot]];
        let partner = partition.minority[partner_pos];
        let p = ds.features().row(base);
        let q = ds.features().row(partner);
        for (out, (a, b)) in row.iter_mut().zip(p.iter().zip(q)) {
            *out = a + r * (b - a);
        }
        synthetic.push_row(&row)?;
        origins.push(SyntheticOrigin { base, partner, r });
    }
    let synth = Dataset::new(
        synthetic,
        vec![partition.minority_label; deficit],
        ds.feature_names().to_vec(),
    )?;
    Ok(SmoteOutcome {
        dataset: ds.concat(&synth)?,
        origins,
        partition: Some(partition),
        used_plain_smote,
        effective_k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dataset(points: &[([f64; 2], bool)]) -> Dataset {
        let rows: Vec<Vec<f64>> = points.iter().map(|(p, _)| p.to_vec()).collect();
        let labels = points.iter().map(|&(_, y)| Label::from_bool(y)).collect();
        Dataset::new(Matrix::from_rows(&rows).unwrap(), labels, vec!["x".into(), "y".into()]).unwrap()
    }

    fn cfg(m: usize, k: usize) -> SmoteConfig {
        SmoteConfig { m_neighbors: m, k_neighbors: k, ..Default::default() }
    }

    // Minority (negative) point 0 at the origin. Its five nearest neighbours
    // sit on a ring of radius 1..5 (brute-force distances are listed in the
    // comments) with three majority and two minority points.
    #[test]
    fn danger_point_with_three_of_five_majority() {
        let ds = dataset(&[
            ([0.0, 0.0], false),
            ([1.0, 0.0], true),   // d = 1
            ([0.0, 2.0], false),  // d = 2
            ([-3.0, 0.0], true),  // d = 3
            ([0.0, -4.0], false), // d = 4
            ([5.0, 0.0], true),   // d = 5
            ([30.0, 30.0], true),
            ([31.0, 30.0], true),
        ]);
        let part = partition_minority(&ds, &cfg(5, 2)).unwrap();
        assert_eq!(part.minority, [0, 2, 4]);
        assert!(part.danger.contains(&0));
    }

    #[test]
    fn noise_and_safe() {
        // minority 0 is surrounded by majority only; minority 6..10 form a cluster
        let mut pts = vec![([0.0, 0.0], false)];
        for i in 0..5 {
            pts.push(([0.1 * (i as f64 + 1.0), 0.0], true));
        }
        for i in 0..5 {
            pts.push(([10.0 + 0.1 * i as f64, 10.0], false));
        }
        for i in 0..8 {
            pts.push(([-20.0 - i as f64, -20.0], true));
        }
        let ds = dataset(&pts);
        let part = partition_minority(&ds, &cfg(5, 3)).unwrap();
        assert_eq!(part.noise, [0]);
        assert_eq!(part.safe, [1, 2, 3, 4, 5]);
        assert!(part.danger.is_empty());
    }

    #[test]
    fn balanced_input_is_unchanged() {
        let ds = dataset(&[([0.0, 0.0], true), ([1.0, 0.0], false)]);
        let out = borderline_smote(&ds, &cfg(1, 1)).unwrap();
        assert_eq!(out.dataset, ds);
        assert!(out.origins.is_empty());
    }

    #[test]
    fn minority_of_one_is_an_error() {
        let ds = dataset(&[([0.0, 0.0], true), ([1.0, 0.0], true), ([2.0, 0.0], false)]);
        assert!(borderline_smote(&ds, &cfg(1, 1)).is_err());
    }

    #[test]
    fn equalizes_and_interpolates() {
        let mut pts = Vec::new();
        for i in 0..12 {
            pts.push(([i as f64 * 0.1, (i % 3) as f64 * 0.1], true));
        }
        for i in 0..4 {
            pts.push(([0.05 + i as f64 * 0.3, 0.15], false));
        }
        let ds = dataset(&pts);
        let out = borderline_smote(&ds, &cfg(5, 3)).unwrap();
        assert_eq!(out.dataset.class_counts().positive, 12);
        assert_eq!(out.dataset.class_counts().negative, 12);
        for (j, o) in out.origins.iter().enumerate() {
            let s = out.dataset.features().row(16 + j);
            let p = ds.features().row(o.base);
            let q = ds.features().row(o.partner);
            assert!((0.0..1.0).contains(&o.r));
            for c in 0..2 {
                assert_eq!(s[c], p[c] + o.r * (q[c] - p[c]));
            }
        }
    }

    #[test]
    fn zero_m_is_rejected() {
        let ds = dataset(&[([0.0, 0.0], true), ([1.0, 0.0], false)]);
        assert!(partition_minority(&ds, &cfg(0, 1)).is_err());
    }
}
