//! End-to-end runs on the synthetic stand-in table.

mod common;

use cadpipe::pipeline::{
    LeakageMode, MetricsFile, Pipeline, RunManifest, AUGMENTED_FILE, CLEAN_FILE, COMPARISON_FILE, FOLDS_FILE,
    MANIFEST_FILE, METRICS_FILE,
};
use cadpipe::Error;
use common::surrogate::fast_config;

fn read_metrics(p: &Pipeline) -> MetricsFile {
    serde_json::from_slice(&std::fs::read(p.out_dir().join(METRICS_FILE)).unwrap()).unwrap()
}

#[test]
fn stage_counts_and_both_modes() {
    let dir = tempfile::tempdir().unwrap();
    let p = Pipeline::new(fast_config(dir.path(), 11, LeakageMode::Both)).unwrap();
    let ingest = p.ingest().unwrap();
    assert_eq!(ingest.rows, 303);
    assert_eq!(ingest.details["predictors"], 57);
    assert_eq!(ingest.details["removed_constant_columns"], serde_json::json!(["Exertional CP"]));
    assert_eq!((ingest.class_counts.positive, ingest.class_counts.negative), (216, 87));

    let balance = p.balance().unwrap();
    assert_eq!((balance.class_counts.positive, balance.class_counts.negative), (216, 216));

    let augment = p.augment().unwrap();
    assert_eq!(augment.rows, 864);
    assert_eq!((augment.class_counts.positive, augment.class_counts.negative), (432, 432));

    let metrics = p.evaluate().unwrap();
    assert_eq!(metrics.runs.len(), 2);
    let faithful = &metrics.runs[0];
    let safe = &metrics.runs[1];
    assert_eq!(faithful.mode, LeakageMode::PaperFaithful);
    assert_eq!(faithful.n_samples, 864);
    assert!(faithful.test_provenance["reconstruction"] > 0);
    assert_eq!(safe.mode, LeakageMode::LeakageSafe);
    assert_eq!(safe.n_samples, 303);
    assert_eq!(safe.test_provenance.keys().collect::<Vec<_>>(), ["original"]);

    for run in &metrics.runs {
        assert_eq!(run.models.len(), 5);
        for m in &run.models {
            assert_eq!(m.folds.len(), 5);
            let mean = m.folds.iter().map(|f| f.accuracy).sum::<f64>() / 5.0;
            assert!((mean - m.mean.accuracy).abs() < 1e-12);
            for f in &m.folds {
                assert_eq!(f.confusion.total(), f.n_test);
                let pr = f.precision + f.recall;
                let f1 = if pr == 0.0 { 0.0 } else { 2.0 * f.precision * f.recall / pr };
                assert!((f1 - f.f1).abs() < 1e-12);
            }
        }
    }

    let table = p.report().unwrap();
    assert!(table.contains("paper_faithful") && table.contains("leakage_safe"), "{table}");
    let csv = std::fs::read_to_string(p.out_dir().join(COMPARISON_FILE)).unwrap();
    assert!(csv.starts_with("source,mode,model,recall,precision,f1,accuracy,roc_auc\n"));
    assert_eq!(csv.lines().filter(|l| l.starts_with("measured,")).count(), 10);
    assert_eq!(csv.lines().filter(|l| l.starts_with("reported,")).count(), 6);
    let folds = std::fs::read_to_string(p.out_dir().join(FOLDS_FILE)).unwrap();
    assert_eq!(folds.lines().count(), 1 + 2 * 5 * 5);
}

#[test]
fn target_total_reaches_826() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = fast_config(dir.path(), 3, LeakageMode::PaperFaithful);
    cfg.autoencoder.target_total = Some(826);
    cfg.models.enabled = vec!["tree".into()];
    let p = Pipeline::new(cfg).unwrap();
    p.ingest().unwrap();
    p.balance().unwrap();
    let e = p.augment().unwrap();
    assert_eq!(e.rows, 826);
    assert_eq!((e.class_counts.positive, e.class_counts.negative), (413, 413));
    let m = p.evaluate().unwrap();
    assert_eq!(m.runs[0].n_samples, 826);
    assert_eq!(m.runs[0].fold_sizes.iter().sum::<usize>(), 826);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = fast_config(dir.path(), 5, LeakageMode::Both);
    cfg.models.enabled = vec!["logreg".into(), "forest".into(), "cnn".into()];
    let p = Pipeline::new(cfg).unwrap();
    let read = |f: &str| std::fs::read(p.out_dir().join(f)).unwrap();
    p.run_all().unwrap();
    let first = (read(METRICS_FILE), read(MANIFEST_FILE), read(AUGMENTED_FILE));
    p.run_all().unwrap();
    assert_eq!(first, (read(METRICS_FILE), read(MANIFEST_FILE), read(AUGMENTED_FILE)));
    assert_eq!(read_metrics(&p).runs.len(), 2);
}

#[test]
fn threads_do_not_change_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = fast_config(dir.path(), 9, LeakageMode::LeakageSafe);
    cfg.models.enabled = vec!["tree".into(), "mlp".into()];
    let p1 = Pipeline::new(cfg.clone()).unwrap();
    p1.run_all().unwrap();
    let one = read_metrics(&p1);
    cfg.threads = 3;
    let p3 = Pipeline::new(cfg).unwrap();
    p3.run_all().unwrap();
    assert_eq!(one, read_metrics(&p3));
}

#[test]
fn missing_prerequisites_name_the_stage() {
    let dir = tempfile::tempdir().unwrap();
    let p = Pipeline::new(fast_config(dir.path(), 1, LeakageMode::PaperFaithful)).unwrap();
    match p.balance().unwrap_err() {
        Error::MissingArtifact { stage, .. } => assert_eq!(stage, "ingest"),
        other => panic!("unexpected {other}"),
    }
    p.ingest().unwrap();
    match p.augment().unwrap_err() {
        Error::MissingArtifact { stage, .. } => assert_eq!(stage, "balance"),
        other => panic!("unexpected {other}"),
    }
    match p.report().unwrap_err() {
        Error::MissingArtifact { stage, .. } => assert_eq!(stage, "evaluate"),
        other => panic!("unexpected {other}"),
    }
}

#[test]
fn tampered_artifacts_fail_integrity() {
    let dir = tempfile::tempdir().unwrap();
    let p = Pipeline::new(fast_config(dir.path(), 2, LeakageMode::PaperFaithful)).unwrap();
    p.ingest().unwrap();
    let clean = p.out_dir().join(CLEAN_FILE);
    let text = std::fs::read_to_string(&clean).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines.pop();
    std::fs::write(&clean, lines.join("\n") + "\n").unwrap();
    let err = p.balance().unwrap_err();
    assert!(matches!(err, Error::Integrity(_)), "{err}");
    assert_eq!(err.exit_code(), 2);

    p.ingest().unwrap();
    let mut manifest = RunManifest::load(p.out_dir()).unwrap().unwrap();
    manifest.stages.get_mut("ingest").unwrap().class_counts.positive += 1;
    manifest.save(p.out_dir()).unwrap();
    assert!(matches!(p.balance().unwrap_err(), Error::Integrity(_)));
}

#[test]
fn ingest_expectations_are_checked() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = fast_config(dir.path(), 1, LeakageMode::PaperFaithful);
    cfg.ingest.expected_predictors = Some(58);
    let err = Pipeline::new(cfg.clone()).unwrap().ingest().unwrap_err();
    assert!(err.to_string().contains("57"), "{err}");
    cfg.ingest.expected_predictors = Some(54);
    cfg.ingest.drop_columns = vec!["LAD".into(), "LCX".into(), "RCA".into()];
    Pipeline::new(cfg.clone()).unwrap().ingest().unwrap();
    cfg.ingest.drop_columns = vec!["Nope".into()];
    assert_eq!(Pipeline::new(cfg).unwrap().ingest().unwrap_err().exit_code(), 1);
}
