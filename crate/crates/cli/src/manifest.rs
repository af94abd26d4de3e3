//! Run manifests: a sidecar JSON recording what produced each output set.

use chrono::{DateTime, SecondsFormat, Utc};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::Path;

/// Accompanies every command's outputs. Timestamps live here, never in the
/// reports themselves, so reruns with identical flags produce byte-identical
/// report files.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    /// SHA-256 over the command's fully resolved configuration.
    pub config_hash: String,
    pub seeds: Vec<u64>,
    pub tool_version: String,
    pub started: String,
    pub finished: String,
}

pub struct ManifestBuilder {
    command: String,
    config_hash: String,
    seeds: Vec<u64>,
    started: DateTime<Utc>,
}

impl ManifestBuilder {
    /// `config` must already contain every input that affects the outputs.
    pub fn start(command: &str, config: &impl Serialize, seeds: Vec<u64>) -> Self {
        let canonical = serde_json::to_vec(config).expect("config serializes");
        let digest = Sha256::digest(&canonical);
        ManifestBuilder {
            command: command.to_string(),
            config_hash: format!("{digest:x}"),
            seeds,
            started: Utc::now(),
        }
    }

    pub fn finish(self) -> RunManifest {
        RunManifest {
            command: self.command,
            config_hash: self.config_hash,
            seeds: self.seeds,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started: self.started.to_rfc3339_opts(SecondsFormat::Millis, true),
            finished: Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true),
        }
    }
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        let path = dir.join(format!("{}_manifest.json", self.command.replace('-', "_")));
        std::fs::write(path, serde_json::to_string_pretty(self).expect("manifest serializes"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_tracks_config_changes() {
        let a = ManifestBuilder::start("gwd", &("voxel12", 20), vec![0]).finish();
        let b = ManifestBuilder::start("gwd", &("voxel12", 20), vec![0]).finish();
        let c = ManifestBuilder::start("gwd", &("voxel12", 10), vec![0]).finish();
        assert_eq!(a.config_hash, b.config_hash);
        assert_ne!(a.config_hash, c.config_hash);
    }
}
