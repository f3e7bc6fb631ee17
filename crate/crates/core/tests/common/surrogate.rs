//! Synthetic stand-in for the Z-Alizadeh Sani extension file.
//!
//! Same columns, level vocabularies, row count (303) and class counts
//! (216 Cad / 87 Normal) as the real data, with `Exertional CP` constant.
//! Values are random; a handful of columns carry class signal so the
//! classifiers have something to learn. It is never a substitute for the
//! real file in accuracy checks.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use cadpipe::data::{DatasetSchema, FeatureKind};
use cadpipe::pipeline::{LeakageMode, PipelineConfig};
use cadpipe::Prng;

pub const ROWS: usize = 303;
pub const CAD: usize = 216;

pub fn schema_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/z_alizadeh_sani_extension.schema.toml")
}

pub fn reference_config_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/reference.toml")
}

const SIGNAL_NUMERIC: [&str; 5] = ["Age", "FBS", "EF-TTE", "Region RWMA", "ESR"];
const SIGNAL_BINARY: [&str; 4] = ["Typical Chest Pain", "DM", "HTN", "Atypical"];
const ARTERIES: [&str; 3] = ["LAD", "LCX", "RCA"];

/// Raw CSV text of the surrogate table.
pub fn raw_csv(seed: u64) -> String {
    let schema = DatasetSchema::load(&schema_path()).expect("schema asset");
    let mut rng = Prng::new(seed);
    let mut labels: Vec<bool> = (0..ROWS).map(|i| i < CAD).collect();
    rng.shuffle(&mut labels);

    let mut header: Vec<&str> = schema.features.iter().map(|f| f.name.as_str()).collect();
    header.push(&schema.label_name);
    let mut out = header.join(",");
    out.push('\n');
    for &cad in &labels {
        let n_stenotic = if cad { 1 + rng.below(3) } else { 0 };
        let mut arteries = [false; 3];
        for slot in rng.permutation(3).into_iter().take(n_stenotic) {
            arteries[slot] = true;
        }
        let mut cells = Vec::with_capacity(header.len());
        for f in &schema.features {
            let name = f.name.as_str();
            let cell = match &f.kind {
                FeatureKind::Numeric => {
                    let shift = if SIGNAL_NUMERIC.contains(&name) && cad { 12.0 } else { 0.0 };
                    let mut s = String::new();
                    let _ = write!(s, "{:.1}", 40.0 + shift + 20.0 * rng.uniform());
                    s
                }
                FeatureKind::Binary { levels } => {
                    let on = if name == "Exertional CP" {
                        false
                    } else if let Some(a) = ARTERIES.iter().position(|&x| x == name) {
                        arteries[a]
                    } else if SIGNAL_BINARY.contains(&name) {
                        rng.uniform() < if cad { 0.7 } else { 0.3 }
                    } else {
                        rng.uniform() < 0.5
                    };
                    levels[usize::from(on)].clone()
                }
                FeatureKind::Categorical { levels } => levels[rng.below(levels.len())].clone(),
            };
            cells.push(cell);
        }
        cells.push(if cad { "Cad" } else { "Normal" }.to_string());
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Writes the surrogate CSV into `dir` and returns a config that runs the
/// whole pipeline on it with small, fast models.
pub fn fast_config(dir: &Path, seed: u64, mode: LeakageMode) -> PipelineConfig {
    let raw = dir.join("surrogate.csv");
    std::fs::write(&raw, raw_csv(seed)).unwrap();
    let mut cfg = PipelineConfig::default();
    cfg.seed = seed;
    cfg.mode = mode;
    cfg.paths.raw_csv = raw;
    cfg.paths.schema = schema_path();
    cfg.paths.out_dir = dir.join("out");
    cfg.ingest.expected_rows = Some(ROWS);
    cfg.ingest.expected_predictors = Some(57);
    cfg.autoencoder.epochs = 5;
    cfg.cv.k = 5;
    let m = &mut cfg.models;
    m.cnn.conv_filters = [4; 4];
    m.cnn.dense_units = [8, 8, 8, 4, 2];
    m.cnn.epochs = 3;
    m.cnn.batch_size = 64;
    m.forest.n_trees = 8;
    m.logreg.epochs = 50;
    m.mlp.hidden = vec![8];
    m.mlp.epochs = 5;
    cfg
}
