//! Experiment manifests.
//!
//! A manifest names a command and carries its parameter block together with
//! the sampling and output settings. Parameter keys are the long flag names
//! with `-` replaced by `_`. Flags given on the command line override the
//! manifest; an unset flag (or a boolean flag left off) does not.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub command: String,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub params: Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

impl Manifest {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            ..Self::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("invalid manifest")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read manifest {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest is plain data")
    }

    pub fn expect_command(&self, command: &str) -> Result<()> {
        if self.command != command {
            bail!("manifest is for `{}`, not `{command}`", self.command);
        }
        Ok(())
    }

    /// The parameter block overlaid with the flags that were set.
    pub fn resolve<T: Serialize + DeserializeOwned>(&self, flags: &T) -> Result<T> {
        let mut merged = self.params.clone();
        if let Value::Object(set) = serde_json::to_value(flags)? {
            for (k, v) in set {
                if !v.is_null() && v != Value::Bool(false) {
                    merged.insert(k, v);
                }
            }
        }
        serde_json::from_value(Value::Object(merged)).with_context(|| format!("invalid parameters for `{}`", self.command))
    }
}
