use std::fmt::Write as _;

use super::stages::MetricsFile;
use crate::eval::render_table;

/// Published 10-fold means in percent:
/// `(model, recall, precision, f1, accuracy, roc_auc)`. The `svm` row has no
/// implementation here and is listed for reference only.
pub const REPORTED: [(&str, [f64; 5]); 6] = [
    ("tree", [87.10, 87.75, 87.30, 89.44, 87.15]),
    ("forest", [93.85, 95.6, 85.00, 94.77, 84.94]),
    ("svm", [92.45, 94.60, 93.40, 94.66, 93.51]),
    ("logreg", [88.60, 90.00, 88.70, 90.25, 88.17]),
    ("mlp", [91.95, 90.35, 91.05, 91.43, 89.85]),
    ("cnn", [95.00, 94.80, 95.05, 95.36, 95.06]),
];

pub const COMPARISON_HEADER: &str = "source,mode,model,recall,precision,f1,accuracy,roc_auc\n";

/// Measured means for every mode and model, followed by the reported rows.
/// Values are percentages with two decimals.
pub fn comparison_csv(metrics: &MetricsFile) -> String {
    let mut out = String::from(COMPARISON_HEADER);
    for run in &metrics.runs {
        for m in &run.models {
            let v = &m.mean;
            let _ = writeln!(
                out,
                "measured,{},{},{:.2},{:.2},{:.2},{:.2},{:.2}",
                run.mode.as_str(),
                m.model,
                100.0 * v.recall,
                100.0 * v.precision,
                100.0 * v.f1,
                100.0 * v.accuracy,
                100.0 * v.roc_auc
            );
        }
    }
    for (model, v) in REPORTED {
        let _ = writeln!(
            out,
            "reported,paper_faithful,{model},{:.2},{:.2},{:.2},{:.2},{:.2}",
            v[0], v[1], v[2], v[3], v[4]
        );
    }
    out
}

/// Human-readable summary: one table per mode plus the reported values.
pub fn render(metrics: &MetricsFile) -> String {
    let mut out = String::new();
    for run in &metrics.runs {
        let title = format!(
            "{} ({} rows, {}-fold{}; precision/recall/F1 for the positive class)",
            run.mode.as_str(),
            run.n_samples,
            run.k,
            if run.stratified { ", stratified" } else { "" }
        );
        out.push_str(&render_table(&title, &run.models));
        let leaked: usize = run
            .test_provenance
            .iter()
            .filter(|(tag, _)| tag.as_str() != "original")
            .map(|(_, n)| n)
            .sum();
        let _ = writeln!(out, "non-original rows in test folds: {leaked}\n");
    }
    out.push_str("reported\n");
    for (model, v) in REPORTED {
        let _ = writeln!(
            out,
            "{model:<8}  {:>6.2}  {:>9.2}  {:>8.2}  {:>8.2}  {:>7.2}",
            v[0], v[1], v[2], v[3], v[4]
        );
    }
    out
}
