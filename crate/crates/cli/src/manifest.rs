//! Run manifests: what a command consumed and produced.
//!
//! A manifest is deterministic for a deterministic run. Timings are printed
//! to stderr instead of being persisted, so reruns with the same seed
//! produce byte-identical manifests.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use rfexplain::error::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct InputRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    pub inputs: Vec<InputRecord>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.to_string(),
            args: std::env::args().skip(1).collect(),
            seed: None,
            config: serde_json::Value::Null,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn with_config(mut self, config: impl Serialize) -> Self {
        self.config = serde_json::to_value(config).unwrap_or(serde_json::Value::Null);
        self
    }

    pub fn record_input(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        let sha256 = hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        self.inputs.push(InputRecord {
            path: path.display().to_string(),
            sha256,
        });
        Ok(())
    }

    pub fn record_output(&mut self, path: impl AsRef<Path>) {
        self.outputs.push(path.as_ref().display().to_string());
    }

    /// Write the manifest beside the outputs and list itself. Output paths
    /// under the manifest's directory are stored relative to it so artifact
    /// directories stay relocatable.
    pub fn write(mut self, path: impl AsRef<Path>) -> Result<PathBuf> {
        let path = path.as_ref().to_path_buf();
        self.record_output(&path);
        if let Some(parent) = path.parent() {
            let prefix = format!("{}{}", parent.display(), std::path::MAIN_SEPARATOR);
            for output in self.outputs.iter_mut() {
                if let Some(stripped) = output.strip_prefix(&prefix) {
                    *output = stripped.to_string();
                }
            }
            self.outputs.sort();
        }
        let text =
            serde_json::to_string_pretty(&self).map_err(|e| Error::ModelParse(e.to_string()))?;
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

/// Manifest path for a primary output file: `<file>.manifest.json`.
pub fn manifest_path_for(output: impl AsRef<Path>) -> PathBuf {
    let output = output.as_ref();
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    output.with_file_name(name)
}
