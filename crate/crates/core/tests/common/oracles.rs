//! Slow, direct re-implementations used to check the fast paths.

use cadpipe::data::{Dataset, Label};
use cadpipe::resample::SmoteConfig;
use cadpipe::rng::stream;
use cadpipe::Prng;

/// `(2 * wins + ties) / (2 * P * N)` over every positive/negative pair.
pub fn pairwise_auc(scores: &[f64], labels: &[Label]) -> f64 {
    let (mut twice_wins, mut pairs) = (0u64, 0u64);
    for (i, li) in labels.iter().enumerate() {
        if !li.is_positive() {
            continue;
        }
        for (j, lj) in labels.iter().enumerate() {
            if lj.is_positive() {
                continue;
            }
            pairs += 1;
            if scores[i] > scores[j] {
                twice_wins += 2;
            } else if scores[i] == scores[j] {
                twice_wins += 1;
            }
        }
    }
    twice_wins as f64 / (2 * pairs) as f64
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        let d = a[i] - b[i];
        s += d * d;
    }
    s
}

/// Full stable sort of every candidate by distance, then index.
pub fn knn_exhaustive(points: &[Vec<f64>], query: &[f64], k: usize, exclude: Option<usize>) -> Vec<usize> {
    let mut all: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != exclude)
        .map(|(i, p)| (dist2(p, query), i))
        .collect();
    all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    all.into_iter().take(k).map(|(_, i)| i).collect()
}

/// Every synthetic row Borderline-SMOTE should produce for `ds`, derived
/// from the definition: danger set from `m`-neighbourhoods over the whole
/// data, bases visited round-robin, and for each row a partner slot and an
/// interpolation factor drawn in that order from the SMOTE stream.
pub fn smote_expected(ds: &Dataset, cfg: &SmoteConfig) -> Vec<Vec<f64>> {
    let rows: Vec<Vec<f64>> = ds.features().iter_rows().map(<[f64]>::to_vec).collect();
    let labels = ds.labels();
    let pos = labels.iter().filter(|l| l.is_positive()).count();
    let neg = labels.len() - pos;
    if pos == neg {
        return Vec::new();
    }
    let minority_label = Label::from_bool(pos <= neg);
    let minority: Vec<usize> = (0..rows.len()).filter(|&i| labels[i] == minority_label).collect();
    let m = cfg.m_neighbors;
    let mut danger = Vec::new();
    for (slot, &i) in minority.iter().enumerate() {
        let majority = knn_exhaustive(&rows, &rows[i], m, Some(i))
            .into_iter()
            .filter(|&j| labels[j] != minority_label)
            .count();
        if majority < m && 2 * majority >= m {
            danger.push(slot);
        }
    }
    let bases: Vec<usize> = if danger.is_empty() { (0..minority.len()).collect() } else { danger };
    let k = cfg.k_neighbors.min(minority.len() - 1);
    let min_rows: Vec<Vec<f64>> = minority.iter().map(|&i| rows[i].clone()).collect();
    let mut rng = Prng::with_stream(cfg.seed, stream::SMOTE);
    let deficit = pos.max(neg) - pos.min(neg);
    (0..deficit)
        .map(|j| {
            let b = bases[j % bases.len()];
            let nbrs = knn_exhaustive(&min_rows, &min_rows[b], k, Some(b));
            let q = &min_rows[nbrs[rng.below(k)]];
            let r = rng.uniform();
            let p = &min_rows[b];
            p.iter().zip(q).map(|(a, c)| a + r * (c - a)).collect()
        })
        .collect()
}
