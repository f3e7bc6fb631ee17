use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FeatureKind {
    Numeric,
    /// Two text levels; the first encodes to 0.0, the second to 1.0.
    Binary {
        #[serde(default = "default_binary_levels")]
        levels: [String; 2],
    },
    /// Ordered levels encoded by their index.
    Categorical { levels: Vec<String> },
}

fn default_binary_levels() -> [String; 2] {
    ["0".to_owned(), "1".to_owned()]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: FeatureKind,
}

/// Column roles and value encodings for a raw table.
///
/// Loaded from a TOML file:
///
/// ```toml
/// label = "Cath"
/// positive_label = "Cad"
/// negative_label = "Normal"   # optional; when set, other label values are rejected
///
/// [[feature]]
/// name = "Age"
/// kind = "numeric"
///
/// [[feature]]
/// name = "Obesity"
/// kind = "binary"
/// levels = ["N", "Y"]
///
/// [[feature]]
/// name = "VHD"
/// kind = "categorical"
/// levels = ["N", "mild", "Moderate", "Severe"]
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSchema {
    #[serde(rename = "label")]
    pub label_name: String,
    pub positive_label: String,
    #[serde(default)]
    pub negative_label: Option<String>,
    #[serde(rename = "feature", default)]
    pub features: Vec<FeatureSpec>,
}

impl DatasetSchema {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let schema: DatasetSchema =
            toml::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.label_name.is_empty() {
            return Err(Error::Schema("label name is empty".into()));
        }
        let mut names = HashSet::new();
        for f in &self.features {
            if f.name.is_empty() {
                return Err(Error::Schema("feature with empty name".into()));
            }
            if !names.insert(f.name.as_str()) {
                return Err(Error::Schema(format!("duplicate feature {:?}", f.name)));
            }
            if f.name == self.label_name {
                return Err(Error::Schema(format!(
                    "label {:?} collides with a feature name",
                    self.label_name
                )));
            }
            let levels: &[String] = match &f.kind {
                FeatureKind::Numeric => &[],
                FeatureKind::Binary { levels } => levels,
                FeatureKind::Categorical { levels } => {
                    if levels.is_empty() {
                        return Err(Error::Schema(format!("feature {:?} has no levels", f.name)));
                    }
                    levels
                }
            };
            let distinct: HashSet<_> = levels.iter().collect();
            if distinct.len() != levels.len() {
                return Err(Error::Schema(format!(
                    "feature {:?} repeats a level",
                    f.name
                )));
            }
        }
        if self.negative_label.as_deref() == Some(self.positive_label.as_str()) {
            return Err(Error::Schema("positive and negative labels are equal".into()));
        }
        Ok(())
    }

    pub fn feature(&self, name: &str) -> Option<&FeatureSpec> {
        self.features.iter().find(|f| f.name == name)
    }
}
