//! Run manifests: what went in, what came out, and with which settings.
//! Manifests carry no timestamps, so identical runs write identical files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::PipelineConfig;
use crate::CliError;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
struct Versions {
    tool: &'static str,
    stop_words: String,
    taxonomy: String,
    taxonomy_rules: String,
    model_format: &'static str,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    command: &'a str,
    arguments: &'a serde_json::Value,
    seed: u64,
    config: serde_json::Value,
    config_sha256: String,
    inputs: &'a [FileDigest],
    outputs: &'a [FileDigest],
    versions: Versions,
}

/// Collects the inputs and outputs of one command, then writes
/// `manifest-<command>.json` into the output directory.
pub struct Run<'c> {
    pub config: &'c PipelineConfig,
    command: &'static str,
    arguments: serde_json::Value,
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
}

impl<'c> Run<'c> {
    pub fn start(config: &'c PipelineConfig, command: &'static str, arguments: serde_json::Value) -> Result<Self, CliError> {
        fs::create_dir_all(&config.output_dir).map_err(|e| CliError::io(&config.output_dir, e))?;
        Ok(Self { config, command, arguments, inputs: Vec::new(), outputs: Vec::new() })
    }

    pub fn input_file(&mut self, path: &Path) -> Result<(), CliError> {
        let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
        self.input_bytes(path.display().to_string(), &bytes);
        Ok(())
    }

    /// Records an input by the digest of a canonical rendering, e.g. a store.
    pub fn input_bytes(&mut self, label: String, bytes: &[u8]) {
        self.inputs.push(FileDigest { path: label, sha256: sha256_hex(bytes) });
    }

    pub fn output_path(&self, name: &str) -> PathBuf {
        self.config.output_dir.join(name)
    }

    /// Writes one output file under the output directory.
    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.output_path(name);
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.outputs.push(FileDigest { path: name.to_string(), sha256: sha256_hex(bytes) });
        Ok(path)
    }

    /// Records a file written elsewhere (the store, a model file).
    pub fn output_file(&mut self, path: &Path) -> Result<(), CliError> {
        let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
        self.outputs.push(FileDigest { path: path.display().to_string(), sha256: sha256_hex(&bytes) });
        Ok(())
    }

    pub fn finish(self, stop_words_version: String) -> Result<PathBuf, CliError> {
        let config = self.config.hashed_view();
        let config_sha256 = sha256_hex(serde_json::to_string(&config).expect("json").as_bytes());
        let tagger = vulnrisk::taxonomy::Tagger::builtin();
        let manifest = Manifest {
            command: self.command,
            arguments: &self.arguments,
            seed: self.config.split_seed,
            config,
            config_sha256,
            inputs: &self.inputs,
            outputs: &self.outputs,
            versions: Versions {
                tool: env!("CARGO_PKG_VERSION"),
                stop_words: stop_words_version,
                taxonomy: tagger.taxonomy().version().to_string(),
                taxonomy_rules: tagger.version().to_string(),
                model_format: vulnrisk::imputer::baseline::MODEL_FORMAT,
            },
        };
        let mut text = serde_json::to_string_pretty(&manifest).expect("json");
        text.push('\n');
        let path = self.output_path(&format!("manifest-{}.json", self.command));
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}
