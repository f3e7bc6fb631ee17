//! Stage orchestration: config, manifest with content digests, and the
//! ingest, balance, augment, evaluate and report stages.

mod config;
mod manifest;
mod report;
mod stages;

pub use config::{
    CvConfig, IngestConfig, LeakageMode, ModelsConfig, PathsConfig, PipelineConfig, MODEL_NAMES,
};
pub use manifest::{
    record_timing, sha256_hex, Counts, FileDigest, RunManifest, StageEntry, MANIFEST_FILE, TIMINGS_FILE,
};
pub use report::{comparison_csv, render, COMPARISON_HEADER, REPORTED};
pub use stages::{
    MetricsFile, ModeRun, Pipeline, Stage, AUGMENTED_FILE, BALANCED_FILE, CLEAN_FILE, COMPARISON_FILE, FOLDS_FILE,
    METRICS_FILE,
};
