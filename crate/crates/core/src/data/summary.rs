use std::fmt::Write as _;

use serde::Serialize;

use super::Dataset;

/// Per-feature descriptive statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureSummary {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub std: f64,
    pub distinct: usize,
    pub mean_positive: f64,
    pub mean_negative: f64,
}

pub fn feature_summary(ds: &Dataset) -> Vec<FeatureSummary> {
    let labels = ds.labels();
    ds.feature_names()
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let col = ds.features().column(j);
            let n = col.len().max(1) as f64;
            let mean = col.iter().sum::<f64>() / n;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            let mut sorted = col.clone();
            sorted.sort_by(f64::total_cmp);
            sorted.dedup();
            let class_mean = |positive: bool| {
                let (s, c) = col
                    .iter()
                    .zip(labels)
                    .filter(|(_, l)| l.is_positive() == positive)
                    .fold((0.0, 0usize), |(s, c), (v, _)| (s + v, c + 1));
                if c == 0 {
                    0.0
                } else {
                    s / c as f64
                }
            };
            FeatureSummary {
                name: name.clone(),
                min: sorted.first().copied().unwrap_or(0.0),
                max: sorted.last().copied().unwrap_or(0.0),
                mean,
                std: var.sqrt(),
                distinct: sorted.len(),
                mean_positive: class_mean(true),
                mean_negative: class_mean(false),
            }
        })
        .collect()
}

/// Aligned text rendering of [`feature_summary`].
pub fn render_summary(rows: &[FeatureSummary]) -> String {
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(7).max(7);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<width$} {:>12} {:>12} {:>12} {:>12} {:>8} {:>12} {:>12}",
        "feature", "min", "max", "mean", "std", "distinct", "mean(pos)", "mean(neg)"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<width$} {:>12.4} {:>12.4} {:>12.4} {:>12.4} {:>8} {:>12.4} {:>12.4}",
            r.name, r.min, r.max, r.mean, r.std, r.distinct, r.mean_positive, r.mean_negative
        );
    }
    out
}
