use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::augment::AutoencoderConfig;
use crate::error::{Error, Result};
use crate::models::{CnnConfig, ForestConfig, LogRegConfig, MlpConfig, ModelFactory, TreeConfig};
use crate::resample::SmoteConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeakageMode {
    /// Balance and augment the whole dataset, then cross-validate.
    #[default]
    PaperFaithful,
    /// Cross-validate the cleaned originals; balance and augment each
    /// training portion only.
    LeakageSafe,
    Both,
}

impl LeakageMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "paper_faithful" => Ok(LeakageMode::PaperFaithful),
            "leakage_safe" => Ok(LeakageMode::LeakageSafe),
            "both" => Ok(LeakageMode::Both),
            _ => Err(Error::Config(format!(
                "unknown mode {s:?}; expected paper-faithful, leakage-safe or both"
            ))),
        }
    }

    /// The single modes this setting expands to.
    pub fn runs(self) -> Vec<LeakageMode> {
        match self {
            LeakageMode::Both => vec![LeakageMode::PaperFaithful, LeakageMode::LeakageSafe],
            m => vec![m],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LeakageMode::PaperFaithful => "paper_faithful",
            LeakageMode::LeakageSafe => "leakage_safe",
            LeakageMode::Both => "both",
        }
    }

    pub fn includes_paper_faithful(self) -> bool {
        self != LeakageMode::LeakageSafe
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    pub raw_csv: PathBuf,
    pub schema: PathBuf,
    pub out_dir: PathBuf,
}

impl Default for PathsConfig {
    fn default() -> Self {
        PathsConfig {
            raw_csv: "data/z_alizadeh_sani_extension.csv".into(),
            schema: "z_alizadeh_sani_extension.schema.toml".into(),
            out_dir: "out".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestConfig {
    /// Columns dropped before constant-column removal.
    pub drop_columns: Vec<String>,
    pub expected_rows: Option<usize>,
    /// Predictor count after cleaning.
    pub expected_predictors: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvConfig {
    pub k: usize,
    pub stratify: bool,
    pub threshold: f64,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            k: 10,
            stratify: true,
            threshold: 0.5,
        }
    }
}

pub const MODEL_NAMES: [&str; 5] = ["cnn", "tree", "forest", "logreg", "mlp"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelsConfig {
    /// Models to evaluate, in report order.
    pub enabled: Vec<String>,
    pub cnn: CnnConfig,
    pub tree: TreeConfig,
    pub forest: ForestConfig,
    pub logreg: LogRegConfig,
    pub mlp: MlpConfig,
}

impl Default for ModelsConfig {
    fn default() -> Self {
        ModelsConfig {
            enabled: MODEL_NAMES.iter().map(|s| s.to_string()).collect(),
            cnn: CnnConfig::default(),
            tree: TreeConfig::default(),
            forest: ForestConfig::default(),
            logreg: LogRegConfig::default(),
            mlp: MlpConfig::default(),
        }
    }
}

impl ModelsConfig {
    pub fn factory(&self, name: &str) -> Result<&dyn ModelFactory> {
        Ok(match name {
            "cnn" => &self.cnn,
            "tree" => &self.tree,
            "forest" => &self.forest,
            "logreg" => &self.logreg,
            "mlp" => &self.mlp,
            other => {
                return Err(Error::Config(format!(
                    "unknown model {other:?}; known models: {}",
                    MODEL_NAMES.join(", ")
                )))
            }
        })
    }

    pub fn factories(&self) -> Result<Vec<&dyn ModelFactory>> {
        self.enabled.iter().map(|n| self.factory(n)).collect()
    }
}

/// Everything a run needs. Every field has a default, so an empty file runs
/// the reference configuration. Relative paths are resolved against the
/// directory holding the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub mode: LeakageMode,
    /// Worker threads for fold-level parallelism.
    pub threads: usize,
    pub paths: PathsConfig,
    pub ingest: IngestConfig,
    pub smote: SmoteConfig,
    pub autoencoder: AutoencoderConfig,
    pub cv: CvConfig,
    pub models: ModelsConfig,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 42,
            mode: LeakageMode::PaperFaithful,
            threads: 1,
            paths: PathsConfig::default(),
            ingest: IngestConfig::default(),
            smote: SmoteConfig::default(),
            autoencoder: AutoencoderConfig::default(),
            cv: CvConfig::default(),
            models: ModelsConfig::default(),
            base_dir: PathBuf::from("."),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: PipelineConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::Config(format!("config file {} not found", path.display())),
            _ => Error::io(path, e),
        })?;
        let mut cfg = Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.cv.k < 2 {
            return Err(Error::Config(format!("cv.k must be at least 2, got {}", self.cv.k)));
        }
        if !(0.0..=1.0).contains(&self.cv.threshold) {
            return Err(Error::Config("cv.threshold must lie in [0, 1]".into()));
        }
        if self.threads == 0 {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        if self.models.enabled.is_empty() {
            return Err(Error::Config("models.enabled is empty".into()));
        }
        self.models.factories()?;
        self.smote.validate()?;
        if self.autoencoder.hidden_dim == 0 || self.autoencoder.epochs == 0 || self.autoencoder.batch_size == 0 {
            return Err(Error::Config("autoencoder sizes must be positive".into()));
        }
        Ok(())
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.resolve(&self.paths.out_dir)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
