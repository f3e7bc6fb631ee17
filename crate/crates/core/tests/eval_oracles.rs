//! Evaluator checks against independent brute-force computations.

use cadpipe::data::Label;
use cadpipe::eval::{confusion, metrics, roc_auc};
use proptest::prelude::*;

/// Counts every positive/negative pair directly.
fn pairwise_auc(scores: &[f64], labels: &[Label]) -> f64 {
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

fn scored_labels() -> impl Strategy<Value = (Vec<f64>, Vec<Label>)> {
    (2usize..120).prop_flat_map(|n| {
        (
            prop::collection::vec((0u8..12).prop_map(|v| v as f64 / 11.0), n),
            prop::collection::vec(any::<bool>().prop_map(Label::from_bool), n),
        )
    })
}

proptest! {
    #[test]
    fn auc_matches_pairwise_count((scores, labels) in scored_labels()) {
        let has_both = labels.iter().any(|l| l.is_positive()) && labels.iter().any(|l| !l.is_positive());
        prop_assume!(has_both);
        prop_assert_eq!(roc_auc(&scores, &labels).unwrap(), pairwise_auc(&scores, &labels));
    }

    #[test]
    fn metrics_ignore_row_order((scores, labels) in scored_labels(), seed: u64) {
        prop_assume!(labels.iter().any(|l| l.is_positive()) && labels.iter().any(|l| !l.is_positive()));
        let perm = cadpipe::Prng::new(seed).permutation(scores.len());
        let s2: Vec<f64> = perm.iter().map(|&i| scores[i]).collect();
        let l2: Vec<Label> = perm.iter().map(|&i| labels[i]).collect();
        prop_assert_eq!(roc_auc(&scores, &labels).unwrap(), roc_auc(&s2, &l2).unwrap());
        let preds = |s: &[f64]| s.iter().map(|&v| Label::from_bool(v >= 0.5)).collect::<Vec<_>>();
        let a = metrics(&confusion(&labels, &preds(&scores)).unwrap());
        let b = metrics(&confusion(&l2, &preds(&s2)).unwrap());
        prop_assert_eq!(a, b);
    }
}

#[test]
fn f1_is_harmonic_mean() {
    for tp in 0..5 {
        for fp in 0..5 {
            for fn_ in 0..5 {
                let m = metrics(&cadpipe::eval::ConfusionCounts { tp, fp, tn: 3, fn_ });
                let expected = if m.precision + m.recall == 0.0 {
                    0.0
                } else {
                    2.0 * m.precision * m.recall / (m.precision + m.recall)
                };
                assert_eq!(m.f1, expected);
            }
        }
    }
}
