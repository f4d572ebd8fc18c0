//! Deployment configuration: health thresholds, the at-EoL window, the
//! reconciliation switch, and an optional custom ruleset path. Read from a
//! key-value (TOML) file; command-line flags override file values.

use std::path::PathBuf;

use serde::Deserialize;
use thiserror::Error;

use crate::eol::health::{HealthError, Thresholds};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error(transparent)]
    Thresholds(#[from] HealthError),
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct HealthConfig {
    pub green_min: f64,
    pub amber_min: f64,
}

impl Default for HealthConfig {
    fn default() -> Self {
        let t = Thresholds::default();
        HealthConfig {
            green_min: t.green_min,
            amber_min: t.amber_min,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct DecisionConfig {
    /// Years-to-reference-life bound for the at-EoL classification.
    pub at_eol_window: i64,
    /// Include the reconciliation rules in the default ruleset.
    pub reconciliation: bool,
    /// Custom ruleset path; overrides the bundled default.
    pub ruleset: Option<PathBuf>,
}

impl Default for DecisionConfig {
    fn default() -> Self {
        DecisionConfig {
            at_eol_window: 1,
            reconciliation: true,
            ruleset: None,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub health: HealthConfig,
    pub decision: DecisionConfig,
}

impl EngineConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: EngineConfig = toml::from_str(text)?;
        config.thresholds()?; // reject unusable thresholds early
        Ok(config)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn thresholds(&self) -> Result<Thresholds, HealthError> {
        Thresholds::new(self.health.green_min, self.health.amber_min)
    }
}
