//! Cross-validated evaluation: fold plans, confusion-based metrics, ROC AUC
//! and per-model reports.

mod folds;
mod metrics;
mod report;

pub use folds::{kfold_split, stratified_kfold_split, FoldPlan};
pub use metrics::{confusion, metrics, roc_auc, ConfusionCounts, Metrics};
pub use report::{folds_csv, render_table, MeanMetrics, MetricsReport, FOLDS_CSV_HEADER};

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::models::ModelFactory;

/// Metrics of one held-out fold. Precision, recall and F1 are for the
/// positive class; the `macro_` fields average both classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldMetrics {
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub confusion: ConfusionCounts,
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
    pub accuracy: f64,
    pub roc_auc: f64,
    pub macro_recall: f64,
    pub macro_precision: f64,
    pub macro_f1: f64,
    pub undefined: Vec<String>,
}

impl FoldMetrics {
    pub fn from_predictions(fold: usize, n_train: usize, test: &Dataset, scores: &[f64], threshold: f64) -> Result<Self> {
        if let Some(i) = scores.iter().position(|s| !(0.0..=1.0).contains(s)) {
            return Err(Error::Data(format!("fold {fold}: score {} of row {i} is outside [0, 1]", scores[i])));
        }
        let preds: Vec<_> = scores.iter().map(|&s| crate::data::Label::from_bool(s >= threshold)).collect();
        let c = confusion(test.labels(), &preds)?;
        let pos = metrics(&c);
        let neg = metrics(&c.flipped());
        let mut undefined = pos.undefined.clone();
        undefined.extend(neg.undefined.iter().map(|m| format!("negative_{m}")));
        Ok(FoldMetrics {
            fold,
            n_train,
            n_test: test.n_samples(),
            confusion: c,
            recall: pos.recall,
            precision: pos.precision,
            f1: pos.f1,
            accuracy: pos.accuracy,
            roc_auc: roc_auc(scores, test.labels())?,
            macro_recall: (pos.recall + neg.recall) / 2.0,
            macro_precision: (pos.precision + neg.precision) / 2.0,
            macro_f1: (pos.f1 + neg.f1) / 2.0,
            undefined,
        })
    }
}

/// Options for [`evaluate_folds`].
#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    pub seed: u64,
    pub threshold: f64,
    /// Worker threads; folds are handed out one at a time.
    pub threads: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { seed: 0, threshold: 0.5, threads: 1 }
    }
}

/// Fits the model on every fold's complement and scores the held-out fold.
///
/// `prepare(fold, seed, train)` may transform the training rows before
/// fitting (for example resampling); the test rows are always taken as-is.
/// Fold `f` uses seed `seed ^ f` for both `prepare` and the model.
pub fn evaluate_folds<P>(
    factory: &dyn ModelFactory,
    ds: &Dataset,
    plan: &FoldPlan,
    opts: EvalOptions,
    prepare: P,
) -> Result<MetricsReport>
where
    P: Fn(usize, u64, Dataset) -> Result<Dataset> + Sync,
{
    plan.validate(ds.n_samples())?;
    for (f, fold) in plan.folds.iter().enumerate() {
        let c = ds.subset(fold).class_counts();
        if c.positive == 0 || c.negative == 0 {
            return Err(Error::Data(format!("test fold {f} contains a single class ({c})")));
        }
    }
    let run_fold = |f: usize| -> Result<FoldMetrics> {
        let seed = opts.seed ^ f as u64;
        let train = prepare(f, seed, ds.subset(&plan.train_indices(f)))?;
        let test = ds.subset(&plan.folds[f]);
        let model = factory.fit(&train, seed).map_err(|e| fold_error(f, factory.name(), e))?;
        let scores = model.predict_scores(test.features())?;
        let m = FoldMetrics::from_predictions(f, train.n_samples(), &test, &scores, opts.threshold)?;
        log::info!("{} fold {f}: accuracy {:.4}, auc {:.4}", factory.name(), m.accuracy, m.roc_auc);
        Ok(m)
    };
    let results: Vec<Mutex<Option<Result<FoldMetrics>>>> = (0..plan.k).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let worker = || loop {
        let f = next.fetch_add(1, Ordering::Relaxed);
        if f >= plan.k {
            break;
        }
        let r = run_fold(f);
        *results[f].lock().expect("fold result lock") = Some(r);
    };
    let threads = opts.threads.clamp(1, plan.k);
    if threads == 1 {
        worker();
    } else {
        std::thread::scope(|s| {
            for _ in 0..threads {
                s.spawn(worker);
            }
        });
    }
    let folds = results
        .into_iter()
        .map(|m| m.into_inner().expect("fold result lock").expect("every fold ran"))
        .collect::<Result<Vec<_>>>()?;
    Ok(MetricsReport::new(factory.name(), folds))
}

fn fold_error(fold: usize, model: &str, e: Error) -> Error {
    match e {
        Error::Data(msg) => Error::Data(format!("{model}, fold {fold}: {msg}")),
        other => other,
    }
}

/// Plain k-fold evaluation without any training-set transformation.
pub fn evaluate_model(factory: &dyn ModelFactory, ds: &Dataset, plan: &FoldPlan, seed: u64) -> Result<MetricsReport> {
    evaluate_folds(factory, ds, plan, EvalOptions { seed, ..Default::default() }, |_, _, train| Ok(train))
}
