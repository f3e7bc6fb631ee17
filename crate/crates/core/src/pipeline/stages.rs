use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::config::{LeakageMode, PipelineConfig};
use super::manifest::{record_timing, sha256_hex, Counts, FileDigest, RunManifest, StageEntry};
use super::report;
use crate::augment::{augment, train_autoencoder};
use crate::data::{
    apply_scaler, encode, fit_scaler, parse_csv, read_dataset, read_tagged, remove_constant_columns, write_dataset,
    write_tagged, Dataset, DatasetSchema, Provenance, RawTable, TaggedDataset,
};
use crate::error::{Error, Result};
use crate::eval::{self, kfold_split, stratified_kfold_split, EvalOptions, FoldPlan, MetricsReport};
use crate::resample::{borderline_smote, SmoteConfig};

pub const CLEAN_FILE: &str = "dataset.clean.csv";
pub const BALANCED_FILE: &str = "dataset.balanced.csv";
pub const AUGMENTED_FILE: &str = "dataset.augmented.csv";
pub const METRICS_FILE: &str = "metrics.json";
pub const FOLDS_FILE: &str = "folds.csv";
pub const COMPARISON_FILE: &str = "comparison.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Ingest,
    Balance,
    Augment,
    Evaluate,
    Report,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Balance => "balance",
            Stage::Augment => "augment",
            Stage::Evaluate => "evaluate",
            Stage::Report => "report",
        }
    }
}

/// Cross-validation results of one leakage mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeRun {
    pub mode: LeakageMode,
    /// Artifact the folds were drawn from.
    pub source: String,
    pub n_samples: usize,
    pub class_counts: Counts,
    pub k: usize,
    pub stratified: bool,
    pub fold_sizes: Vec<usize>,
    /// Provenance tags of the rows that landed in test folds.
    pub test_provenance: BTreeMap<String, usize>,
    pub models: Vec<MetricsReport>,
}

/// Contents of `metrics.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsFile {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub runs: Vec<ModeRun>,
}

/// Stage runner bound to one config and output directory.
pub struct Pipeline {
    pub cfg: PipelineConfig,
    out: PathBuf,
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<FileDigest> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))?;
    Ok(FileDigest {
        path: path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
        sha256: sha256_hex(bytes),
    })
}

fn provenance_counts(tags: &[Provenance]) -> BTreeMap<String, usize> {
    let mut map = BTreeMap::new();
    for t in tags {
        *map.entry(t.as_str().to_string()).or_insert(0) += 1;
    }
    map
}

fn drop_columns(table: RawTable, names: &[String]) -> Result<RawTable> {
    if names.is_empty() {
        return Ok(table);
    }
    let mut keep = Vec::new();
    for name in names {
        if table.column_index(name).is_none() {
            return Err(Error::Config(format!("ingest.drop_columns: no column named {name:?}")));
        }
    }
    for (j, h) in table.header().iter().enumerate() {
        if !names.contains(h) {
            keep.push(j);
        }
    }
    let header = keep.iter().map(|&j| table.header()[j].clone()).collect();
    let rows = table.rows().iter().map(|r| keep.iter().map(|&j| r[j].clone()).collect()).collect();
    RawTable::new(header, rows)
}

impl Pipeline {
    pub fn new(cfg: PipelineConfig) -> Result<Self> {
        cfg.validate()?;
        let out = cfg.out_dir();
        std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
        Ok(Pipeline { cfg, out })
    }

    pub fn out_dir(&self) -> &Path {
        &self.out
    }

    fn config_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.cfg).expect("config serializes")
    }

    fn manifest(&self, required_by: Stage) -> Result<RunManifest> {
        let mut m = RunManifest::load(&self.out)?.ok_or_else(|| Error::MissingArtifact {
            path: self.out.join(super::manifest::MANIFEST_FILE),
            stage: if required_by == Stage::Report { "evaluate" } else { "ingest" },
        })?;
        m.seed = self.cfg.seed;
        m.config = self.config_json();
        Ok(m)
    }

    /// Reads an artifact written by `producer` and checks it against the
    /// digest the manifest recorded for it.
    fn read_checked(&self, manifest: &RunManifest, producer: Stage, file: &str) -> Result<Vec<u8>> {
        let path = self.out.join(file);
        let missing = || Error::MissingArtifact { path: path.clone(), stage: producer.name() };
        let entry = manifest.stage(producer.name()).ok_or_else(missing)?;
        let recorded = entry.outputs.iter().find(|d| d.path == file).ok_or_else(missing)?;
        let bytes = match std::fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(missing()),
            Err(e) => return Err(Error::io(&path, e)),
        };
        if sha256_hex(&bytes) != recorded.sha256 {
            return Err(Error::Integrity(format!(
                "{} does not match the digest recorded by the {} stage",
                path.display(),
                producer.name()
            )));
        }
        Ok(bytes)
    }

    fn check_counts(manifest: &RunManifest, producer: Stage, ds: &Dataset) -> Result<()> {
        if let Some(entry) = manifest.stage(producer.name()) {
            let seen = Counts::from(ds.class_counts());
            if seen != entry.class_counts || ds.n_samples() != entry.rows {
                return Err(Error::Integrity(format!(
                    "{} output has {} rows {:?}, manifest records {} rows {:?}",
                    producer.name(),
                    ds.n_samples(),
                    seen,
                    entry.rows,
                    entry.class_counts
                )));
            }
        }
        Ok(())
    }

    fn load_clean(&self, m: &RunManifest) -> Result<Dataset> {
        let ds = read_dataset(&self.read_checked(m, Stage::Ingest, CLEAN_FILE)?)?;
        Self::check_counts(m, Stage::Ingest, &ds)?;
        Ok(ds)
    }

    fn load_tagged(&self, m: &RunManifest, producer: Stage, file: &str) -> Result<TaggedDataset> {
        let ds = read_tagged(&self.read_checked(m, producer, file)?)?;
        Self::check_counts(m, producer, &ds.dataset)?;
        Ok(ds)
    }

    fn timed<T>(&self, stage: Stage, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f()?;
        let secs = start.elapsed().as_secs_f64();
        log::info!("{} finished in {secs:.2}s", stage.name());
        record_timing(&self.out, stage.name(), secs)?;
        Ok(out)
    }

    /// Parses, cleans, encodes and scales the raw table.
    pub fn ingest(&self) -> Result<StageEntry> {
        self.timed(Stage::Ingest, || {
            let raw_path = self.cfg.resolve(&self.cfg.paths.raw_csv);
            let raw = std::fs::read(&raw_path).map_err(|e| Error::io(&raw_path, e))?;
            let schema_path = self.cfg.resolve(&self.cfg.paths.schema);
            let schema = DatasetSchema::load(&schema_path)?;
            let table = parse_csv(&raw)?;
            let (raw_rows, raw_columns) = (table.n_rows(), table.n_columns());
            let table = drop_columns(table, &self.cfg.ingest.drop_columns)?;
            let cleaned = remove_constant_columns(&table, Some(&schema.label_name));
            let ds = encode(&cleaned.table, &schema)?;
            let ing = &self.cfg.ingest;
            if let Some(rows) = ing.expected_rows.filter(|&r| r != ds.n_samples()) {
                return Err(Error::Data(format!("expected {rows} rows, found {}", ds.n_samples())));
            }
            if let Some(d) = ing.expected_predictors.filter(|&d| d != ds.n_features()) {
                return Err(Error::Data(format!(
                    "expected {d} predictors after cleaning, found {}",
                    ds.n_features()
                )));
            }
            ds.require_both_classes()?;
            let scaler = fit_scaler(&ds)?;
            let scaled = apply_scaler(&ds, &scaler)?;
            let mut bytes = Vec::new();
            write_dataset(&mut bytes, &scaled)?;
            let output = write_file(&self.out.join(CLEAN_FILE), &bytes)?;

            let mut manifest = RunManifest::new(self.cfg.seed, self.config_json());
            let entry = StageEntry {
                inputs: vec![
                    FileDigest { path: self.cfg.paths.raw_csv.display().to_string(), sha256: sha256_hex(&raw) },
                    FileDigest {
                        path: self.cfg.paths.schema.display().to_string(),
                        sha256: sha256_hex(&std::fs::read(&schema_path).map_err(|e| Error::io(&schema_path, e))?),
                    },
                ],
                outputs: vec![output],
                rows: scaled.n_samples(),
                class_counts: scaled.class_counts().into(),
                details: BTreeMap::from([
                    ("raw_rows".into(), json!(raw_rows)),
                    ("raw_columns".into(), json!(raw_columns)),
                    ("dropped_columns".into(), json!(self.cfg.ingest.drop_columns)),
                    ("removed_constant_columns".into(), json!(cleaned.removed)),
                    ("constant_label".into(), json!(cleaned.constant_label)),
                    ("predictors".into(), json!(scaled.n_features())),
                    ("feature_names".into(), json!(scaled.feature_names())),
                    ("scaler".into(), serde_json::to_value(&scaler).expect("scaler serializes")),
                ]),
            };
            manifest.stages.insert(Stage::Ingest.name().into(), entry.clone());
            manifest.save(&self.out)?;
            Ok(entry)
        })
    }

    fn smote_config(&self, seed: u64) -> SmoteConfig {
        SmoteConfig { seed, ..self.cfg.smote.clone() }
    }

    /// Borderline-SMOTE on the cleaned dataset.
    pub fn balance(&self) -> Result<StageEntry> {
        self.timed(Stage::Balance, || {
            let mut manifest = self.manifest(Stage::Balance)?;
            let clean = self.load_clean(&manifest)?;
            let outcome = borderline_smote(&clean, &self.smote_config(self.cfg.seed))?;
            let tagged = outcome.tagged();
            let mut bytes = Vec::new();
            write_tagged(&mut bytes, &tagged)?;
            let output = write_file(&self.out.join(BALANCED_FILE), &bytes)?;
            let mut details = BTreeMap::from([
                ("synthetic_rows".into(), json!(outcome.origins.len())),
                ("used_plain_smote".into(), json!(outcome.used_plain_smote)),
                ("effective_k".into(), json!(outcome.effective_k)),
            ]);
            if let Some(p) = &outcome.partition {
                details.insert("minority_label".into(), json!(p.minority_label));
                details.insert("safe".into(), json!(p.safe.len()));
                details.insert("danger".into(), json!(p.danger.len()));
                details.insert("noise".into(), json!(p.noise.len()));
            }
            let entry = StageEntry {
                inputs: manifest.stage(Stage::Ingest.name()).map(|e| e.outputs.clone()).unwrap_or_default(),
                outputs: vec![output],
                rows: tagged.dataset.n_samples(),
                class_counts: tagged.dataset.class_counts().into(),
                details,
            };
            manifest.invalidate(&["augment", "evaluate", "report"]);
            manifest.stages.insert(Stage::Balance.name().into(), entry.clone());
            manifest.save(&self.out)?;
            Ok(entry)
        })
    }

    /// Trains the autoencoder on the balanced rows and appends reconstructions.
    pub fn augment(&self) -> Result<StageEntry> {
        self.timed(Stage::Augment, || {
            let mut manifest = self.manifest(Stage::Augment)?;
            let balanced = self.load_tagged(&manifest, Stage::Balance, BALANCED_FILE)?;
            let ae_cfg = &self.cfg.autoencoder;
            let spec = ae_cfg.spec(balanced.dataset.n_features(), self.cfg.seed);
            let ae = train_autoencoder(&balanced.dataset, &spec)?;
            let out = augment(&balanced, &ae, ae_cfg.target_total)?;
            let mut bytes = Vec::new();
            write_tagged(&mut bytes, &out)?;
            let output = write_file(&self.out.join(AUGMENTED_FILE), &bytes)?;
            let entry = StageEntry {
                inputs: manifest.stage(Stage::Balance.name()).map(|e| e.outputs.clone()).unwrap_or_default(),
                outputs: vec![output],
                rows: out.dataset.n_samples(),
                class_counts: out.dataset.class_counts().into(),
                details: BTreeMap::from([
                    ("target_total".into(), json!(ae_cfg.target_total)),
                    ("reconstructions".into(), json!(out.count(Provenance::Reconstruction))),
                    ("final_mse".into(), json!(ae.final_mse)),
                    ("provenance".into(), json!(provenance_counts(&out.provenance))),
                ]),
            };
            manifest.invalidate(&["evaluate", "report"]);
            manifest.stages.insert(Stage::Augment.name().into(), entry.clone());
            manifest.save(&self.out)?;
            Ok(entry)
        })
    }

    fn fold_plan(&self, ds: &Dataset) -> Result<FoldPlan> {
        if self.cfg.cv.stratify {
            stratified_kfold_split(ds.labels(), self.cfg.cv.k, self.cfg.seed)
        } else {
            kfold_split(ds.n_samples(), self.cfg.cv.k, self.cfg.seed)
        }
    }

    fn eval_options(&self) -> EvalOptions {
        EvalOptions { seed: self.cfg.seed, threshold: self.cfg.cv.threshold, threads: self.cfg.threads }
    }

    fn run_mode(&self, manifest: &RunManifest, mode: LeakageMode) -> Result<(ModeRun, FileDigest)> {
        let (tagged, source, producer) = match mode {
            LeakageMode::PaperFaithful => {
                (self.load_tagged(manifest, Stage::Augment, AUGMENTED_FILE)?, AUGMENTED_FILE, Stage::Augment)
            }
            _ => (TaggedDataset::all_original(self.load_clean(manifest)?), CLEAN_FILE, Stage::Ingest),
        };
        let input = manifest
            .stage(producer.name())
            .and_then(|e| e.outputs.iter().find(|d| d.path == source).cloned())
            .expect("checked by read_checked");
        let ds = &tagged.dataset;
        let plan = self.fold_plan(ds)?;
        let test_tags: Vec<Provenance> = plan.folds.iter().flatten().map(|&i| tagged.provenance[i]).collect();
        let mut models = Vec::new();
        for factory in self.cfg.models.factories()? {
            log::info!("evaluating {} ({})", factory.name(), mode.as_str());
            let report = match mode {
                LeakageMode::PaperFaithful => {
                    eval::evaluate_folds(factory, ds, &plan, self.eval_options(), |_, _, train| Ok(train))?
                }
                _ => eval::evaluate_folds(factory, ds, &plan, self.eval_options(), |_, seed, train| {
                    self.balance_and_augment(seed, train)
                })?,
            };
            models.push(report);
        }
        let run = ModeRun {
            mode,
            source: source.to_string(),
            n_samples: ds.n_samples(),
            class_counts: ds.class_counts().into(),
            k: plan.k,
            stratified: plan.stratified,
            fold_sizes: plan.folds.iter().map(Vec::len).collect(),
            test_provenance: provenance_counts(&test_tags),
            models,
        };
        Ok((run, input))
    }

    /// Per-fold resampling used in leakage-safe mode. Every reconstruction
    /// is kept; `target_total` only applies to the whole-dataset augment stage.
    fn balance_and_augment(&self, seed: u64, train: Dataset) -> Result<Dataset> {
        let balanced = borderline_smote(&train, &self.smote_config(seed))?.tagged();
        let spec = self.cfg.autoencoder.spec(train.n_features(), seed);
        let ae = train_autoencoder(&balanced.dataset, &spec)?;
        Ok(augment(&balanced, &ae, None)?.dataset)
    }

    /// Cross-validates every enabled model in each configured mode.
    pub fn evaluate(&self) -> Result<MetricsFile> {
        self.timed(Stage::Evaluate, || {
            let mut manifest = self.manifest(Stage::Evaluate)?;
            let mut runs = Vec::new();
            let mut inputs = Vec::new();
            for mode in self.cfg.mode.runs() {
                let (run, input) = self.run_mode(&manifest, mode)?;
                runs.push(run);
                inputs.push(input);
            }
            let metrics = MetricsFile {
                tool: env!("CARGO_PKG_NAME").to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                seed: self.cfg.seed,
                runs,
            };
            let mut json_text = serde_json::to_string_pretty(&metrics).expect("metrics serialize");
            json_text.push('\n');
            let metrics_digest = write_file(&self.out.join(METRICS_FILE), json_text.as_bytes())?;
            let mut folds = String::from(eval::FOLDS_CSV_HEADER);
            for run in &metrics.runs {
                folds.push_str(&eval::folds_csv(run.mode.as_str(), &run.models));
            }
            let folds_digest = write_file(&self.out.join(FOLDS_FILE), folds.as_bytes())?;
            let first = &metrics.runs[0];
            let means: BTreeMap<String, BTreeMap<String, f64>> = metrics
                .runs
                .iter()
                .map(|r| {
                    let acc = r.models.iter().map(|m| (m.model.clone(), m.mean.accuracy)).collect();
                    (r.mode.as_str().to_string(), acc)
                })
                .collect();
            let entry = StageEntry {
                inputs,
                outputs: vec![metrics_digest, folds_digest],
                rows: first.n_samples,
                class_counts: first.class_counts,
                details: BTreeMap::from([("mean_accuracy".into(), json!(means))]),
            };
            manifest.invalidate(&["report"]);
            manifest.stages.insert(Stage::Evaluate.name().into(), entry.clone());
            manifest.save(&self.out)?;
            Ok(metrics)
        })
    }

    /// Writes the comparison table and returns it as aligned text.
    pub fn report(&self) -> Result<String> {
        self.timed(Stage::Report, || {
            let mut manifest = self.manifest(Stage::Report)?;
            let bytes = self.read_checked(&manifest, Stage::Evaluate, METRICS_FILE)?;
            let metrics: MetricsFile = serde_json::from_slice(&bytes)
                .map_err(|e| Error::Integrity(format!("{METRICS_FILE}: {e}")))?;
            let csv = report::comparison_csv(&metrics);
            let output = write_file(&self.out.join(COMPARISON_FILE), csv.as_bytes())?;
            let entry = StageEntry {
                inputs: manifest.stage(Stage::Evaluate.name()).map(|e| e.outputs[..1].to_vec()).unwrap_or_default(),
                outputs: vec![output],
                rows: metrics.runs.iter().map(|r| r.models.len()).sum(),
                class_counts: metrics.runs[0].class_counts,
                details: BTreeMap::new(),
            };
            manifest.stages.insert(Stage::Report.name().into(), entry);
            manifest.save(&self.out)?;
            Ok(report::render(&metrics))
        })
    }

    /// Runs every stage the configured mode needs, in order.
    pub fn run_all(&self) -> Result<String> {
        self.ingest()?;
        if self.cfg.mode.includes_paper_faithful() {
            self.balance()?;
            self.augment()?;
        }
        self.evaluate()?;
        self.report()
    }
}
