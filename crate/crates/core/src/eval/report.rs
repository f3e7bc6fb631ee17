use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::FoldMetrics;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MeanMetrics {
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
    pub accuracy: f64,
    pub roc_auc: f64,
    pub macro_recall: f64,
    pub macro_precision: f64,
    pub macro_f1: f64,
}

/// Per-fold metrics of one model plus their unweighted means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub model: String,
    pub folds: Vec<FoldMetrics>,
    pub mean: MeanMetrics,
}

impl MetricsReport {
    pub fn new(model: &str, folds: Vec<FoldMetrics>) -> Self {
        let k = folds.len().max(1) as f64;
        let avg = |f: fn(&FoldMetrics) -> f64| folds.iter().map(f).sum::<f64>() / k;
        let mean = MeanMetrics {
            recall: avg(|m| m.recall),
            precision: avg(|m| m.precision),
            f1: avg(|m| m.f1),
            accuracy: avg(|m| m.accuracy),
            roc_auc: avg(|m| m.roc_auc),
            macro_recall: avg(|m| m.macro_recall),
            macro_precision: avg(|m| m.macro_precision),
            macro_f1: avg(|m| m.macro_f1),
        };
        MetricsReport { model: model.to_string(), folds, mean }
    }
}

fn pct(v: f64) -> String {
    format!("{:.2}", 100.0 * v)
}

/// Aligned text table of mean metrics in percent, one row per report.
pub fn render_table(title: &str, reports: &[MetricsReport]) -> String {
    let header = ["Model", "Recall", "Precision", "F1 Score", "Accuracy", "ROC AUC"];
    let rows: Vec<[String; 6]> = reports
        .iter()
        .map(|r| {
            [
                r.model.clone(),
                pct(r.mean.recall),
                pct(r.mean.precision),
                pct(r.mean.f1),
                pct(r.mean.accuracy),
                pct(r.mean.roc_auc),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = format!("{title}\n");
    let line = |out: &mut String, cells: &[&str]| {
        for (i, (cell, w)) in cells.iter().zip(widths).enumerate() {
            let _ = if i == 0 { write!(out, "{cell:<w$}") } else { write!(out, "  {cell:>w$}") };
        }
        out.push('\n');
    };
    line(&mut out, &header);
    for row in &rows {
        line(&mut out, &row.each_ref().map(String::as_str));
    }
    out
}

/// One CSV row per model and fold.
pub fn folds_csv(mode: &str, reports: &[MetricsReport]) -> String {
    let mut out = String::new();
    for r in reports {
        for f in &r.folds {
            let c = &f.confusion;
            let _ = writeln!(
                out,
                "{mode},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.model,
                f.fold,
                f.n_train,
                f.n_test,
                c.tp,
                c.fp,
                c.tn,
                c.fn_,
                f.recall,
                f.precision,
                f.f1,
                f.accuracy,
                f.roc_auc
            );
        }
    }
    out
}

pub const FOLDS_CSV_HEADER: &str = "mode,model,fold,n_train,n_test,tp,fp,tn,fn,recall,precision,f1,accuracy,roc_auc\n";
