//! Run manifests: enough to rerun an experiment and check its outputs.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicaSeed {
    pub replica: u64,
    pub master: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub code_version: String,
    pub config_hash: String,
    /// Canonical configuration text; `--config manifest.json` reruns from it.
    pub config: String,
    pub seeds: Vec<ReplicaSeed>,
    pub started_unix: u64,
    pub finished_unix: u64,
    /// `complete`, or `failed: <reason>` when only part of the ensemble finished.
    pub status: String,
    pub files: Vec<FileEntry>,
}

pub fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn sha256_file(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(std::fs::read(path)?)))
}

impl RunManifest {
    pub fn new(command: &str, cfg: &ExperimentConfig, replicas: u64, started_unix: u64) -> Self {
        Self {
            command: command.to_string(),
            code_version: crate::VERSION.to_string(),
            config_hash: cfg.hash(),
            config: cfg.to_text(),
            seeds: (0..replicas)
                .map(|r| ReplicaSeed {
                    replica: r,
                    master: cfg.seed,
                })
                .collect(),
            started_unix,
            finished_unix: started_unix,
            status: "complete".into(),
            files: Vec::new(),
        }
    }

    /// Records the listed files of `dir` (in the given order) and writes the manifest.
    pub fn finish(mut self, dir: &Path, files: &[String], status: &str) -> Result<Self> {
        self.files = files
            .iter()
            .map(|name| {
                let p = dir.join(name);
                Ok(FileEntry {
                    name: name.clone(),
                    bytes: std::fs::metadata(&p)?.len(),
                    sha256: sha256_file(&p)?,
                })
            })
            .collect::<Result<_>>()?;
        self.status = status.to_string();
        self.finished_unix = unix_now();
        let json = serde_json::to_string_pretty(&self)?;
        std::fs::write(dir.join(MANIFEST_FILE), json + "\n")?;
        Ok(self)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn experiment_config(&self) -> Result<ExperimentConfig> {
        ExperimentConfig::parse(&self.config)
    }

    /// Names of recorded files whose current contents differ from the manifest.
    pub fn verify(&self, dir: &Path) -> Result<Vec<String>> {
        let mut bad = Vec::new();
        for f in &self.files {
            match sha256_file(&dir.join(&f.name)) {
                Ok(h) if h == f.sha256 => {}
                Ok(_) => bad.push(f.name.clone()),
                Err(Error::Io(_)) => bad.push(f.name.clone()),
                Err(e) => return Err(e),
            }
        }
        Ok(bad)
    }
}

/// Loads a configuration from a flat config file or from a manifest.
pub fn load_config_or_manifest(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    if text.trim_start().starts_with('{') {
        let m: RunManifest = serde_json::from_str(&text)?;
        m.experiment_config()
    } else {
        ExperimentConfig::parse(&text)
    }
}
