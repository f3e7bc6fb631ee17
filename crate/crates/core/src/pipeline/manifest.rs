use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::ClassCounts;
use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const TIMINGS_FILE: &str = "timings.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub positive: usize,
    pub negative: usize,
}

impl From<ClassCounts> for Counts {
    fn from(c: ClassCounts) -> Self {
        Counts { positive: c.positive, negative: c.negative }
    }
}

/// What one stage read and wrote.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageEntry {
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub rows: usize,
    pub class_counts: Counts,
    /// Stage-specific facts such as removed columns or provenance counts.
    #[serde(default)]
    pub details: BTreeMap<String, serde_json::Value>,
}

/// Content digests, counts and the effective config of a run. Contains no
/// wall-clock data, so identical runs produce identical manifests; stage
/// durations go to a separate timings file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub notes: Vec<String>,
    pub stages: BTreeMap<String, StageEntry>,
}

impl RunManifest {
    pub fn new(seed: u64, config: serde_json::Value) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config,
            notes: vec![
                "min-max scaling is fit on the cleaned original rows before any resampling; SMOTE and the autoencoder operate in scaled space".into(),
            ],
            stages: BTreeMap::new(),
        }
    }

    pub fn load(dir: &Path) -> Result<Option<Self>> {
        let path = dir.join(MANIFEST_FILE);
        match std::fs::read(&path) {
            Ok(bytes) => serde_json::from_slice(&bytes)
                .map(Some)
                .map_err(|e| Error::Integrity(format!("{}: {e}", path.display()))),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(Error::io(&path, e)),
        }
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        let path = dir.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }

    pub fn stage(&self, name: &str) -> Option<&StageEntry> {
        self.stages.get(name)
    }

    /// Drops the entries of `stages`, which are about to be recomputed.
    pub fn invalidate(&mut self, stages: &[&str]) {
        for s in stages {
            self.stages.remove(*s);
        }
    }
}

/// Stage durations in seconds, kept apart from the manifest.
pub fn record_timing(dir: &Path, stage: &str, seconds: f64) -> Result<()> {
    let path = dir.join(TIMINGS_FILE);
    let mut map: BTreeMap<String, f64> = std::fs::read(&path)
        .ok()
        .and_then(|b| serde_json::from_slice(&b).ok())
        .unwrap_or_default();
    map.insert(stage.to_string(), seconds);
    let text = serde_json::to_string_pretty(&map).expect("timings serialize");
    std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(sha256_hex(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        assert!(RunManifest::load(dir.path()).unwrap().is_none());
        let mut m = RunManifest::new(3, serde_json::json!({"seed": 3}));
        m.stages.insert(
            "ingest".into(),
            StageEntry {
                inputs: vec![],
                outputs: vec![FileDigest { path: "a.csv".into(), sha256: sha256_hex(b"x") }],
                rows: 4,
                class_counts: Counts { positive: 3, negative: 1 },
                details: BTreeMap::new(),
            },
        );
        m.save(dir.path()).unwrap();
        assert_eq!(RunManifest::load(dir.path()).unwrap().unwrap(), m);
    }
}
