//! Run manifests: every output directory records the command, a hash of the
//! resolved configuration, the seed, the tool version and timestamps, so a
//! rerun with the same config and seed reproduces the same numbers.

use std::path::Path;

use anyhow::Result;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub command: String,
    /// The fully resolved run options (dimensions, horizon, modes, paths).
    pub config: serde_json::Value,
    pub config_hash: String,
    pub seed: u64,
    pub tool_version: String,
    pub started: String,
    pub finished: String,
}

pub struct ManifestBuilder {
    command: String,
    config: serde_json::Value,
    config_hash: String,
    seed: u64,
    started: chrono::DateTime<chrono::Utc>,
}

impl ManifestBuilder {
    pub fn start<C: Serialize>(command: &str, config: &C, seed: u64) -> Result<Self> {
        let config = serde_json::to_value(config)?;
        let canonical = serde_json::to_string(&config)?;
        let digest = Sha256::digest(canonical.as_bytes());
        let config_hash = digest.iter().map(|b| format!("{b:02x}")).collect();
        Ok(ManifestBuilder {
            command: command.to_string(),
            config,
            config_hash,
            seed,
            started: chrono::Utc::now(),
        })
    }

    /// Extends the recorded configuration with resolved values that were not
    /// part of the raw arguments (system dimensions, for instance).
    pub fn note<V: Serialize>(&mut self, key: &str, value: V) -> Result<()> {
        if let serde_json::Value::Object(map) = &mut self.config {
            map.insert(key.to_string(), serde_json::to_value(value)?);
        }
        Ok(())
    }

    pub fn write(self, dir: &Path) -> Result<()> {
        let manifest = RunManifest {
            command: self.command,
            config: self.config,
            config_hash: self.config_hash,
            seed: self.seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started: self.started.to_rfc3339(),
            finished: chrono::Utc::now().to_rfc3339(),
        };
        std::fs::create_dir_all(dir)?;
        std::fs::write(
            dir.join("manifest.json"),
            serde_json::to_string_pretty(&manifest)?,
        )?;
        Ok(())
    }
}
