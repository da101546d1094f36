//! Pipeline configuration: built-in defaults, overridden by a `key = value`
//! config file, overridden by command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use vulnrisk::text::{StopWords, DEFAULT_MAX_TOKENS};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModelChoice {
    /// No imputation; incomplete records are an error.
    None,
    Baseline,
    External,
    /// Answers with the stored ground truth. For testing the pipeline.
    PerfectOracle,
}

impl fmt::Display for ModelChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ModelChoice::None => "none",
            ModelChoice::Baseline => "baseline",
            ModelChoice::External => "external",
            ModelChoice::PerfectOracle => "perfect-oracle",
        };
        f.write_str(s)
    }
}

/// Keys accepted in the config file. All optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    store_path: Option<PathBuf>,
    stop_word_list_path: Option<PathBuf>,
    max_tokens: Option<usize>,
    split_seed: Option<u64>,
    mask_fraction: Option<f64>,
    model: Option<ModelChoice>,
    endpoint: Option<String>,
    model_path: Option<PathBuf>,
    timeout_ms: Option<u64>,
    output_dir: Option<PathBuf>,
    workers: Option<usize>,
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub store_path: PathBuf,
    pub stop_word_list_path: Option<PathBuf>,
    pub max_tokens: usize,
    pub split_seed: u64,
    pub mask_fraction: f64,
    pub model: ModelChoice,
    pub endpoint: Option<String>,
    pub model_path: PathBuf,
    pub timeout_ms: u64,
    pub output_dir: PathBuf,
    pub workers: usize,
}

/// Values given on the command line; `None` defers to the file or default.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub store_path: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub workers: Option<usize>,
    pub max_tokens: Option<usize>,
    pub split_seed: Option<u64>,
    pub mask_fraction: Option<f64>,
    pub model: Option<ModelChoice>,
    pub endpoint: Option<String>,
    pub model_path: Option<PathBuf>,
}

pub const DEFAULT_STORE: &str = "nvd-store";
pub const DEFAULT_OUTPUT_DIR: &str = "vulnrisk-out";
pub const MODEL_FILE: &str = "baseline-model.txt";

impl PipelineConfig {
    pub fn resolve(file: Option<&Path>, o: Overrides) -> Result<Self, CliError> {
        let f = match file {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                toml::from_str::<FileConfig>(&text)
                    .map_err(|e| CliError::Usage(format!("config file {}: {}", path.display(), e.message())))?
            }
            None => FileConfig::default(),
        };
        let output_dir = o.output_dir.or(f.output_dir).unwrap_or_else(|| DEFAULT_OUTPUT_DIR.into());
        let config = Self {
            store_path: o.store_path.or(f.store_path).unwrap_or_else(|| DEFAULT_STORE.into()),
            stop_word_list_path: f.stop_word_list_path,
            max_tokens: o.max_tokens.or(f.max_tokens).unwrap_or(DEFAULT_MAX_TOKENS),
            split_seed: o.split_seed.or(f.split_seed).unwrap_or(42),
            mask_fraction: o.mask_fraction.or(f.mask_fraction).unwrap_or(0.24),
            model: o.model.or(f.model).unwrap_or(ModelChoice::Baseline),
            endpoint: o.endpoint.or(f.endpoint),
            model_path: o.model_path.or(f.model_path).unwrap_or_else(|| output_dir.join(MODEL_FILE)),
            timeout_ms: f.timeout_ms.unwrap_or(30_000),
            workers: o.workers.or(f.workers).unwrap_or(4),
            output_dir,
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        let usage = |m: String| Err(CliError::Usage(m));
        if self.max_tokens < 10 {
            return usage(format!("max_tokens must be at least 10, got {}", self.max_tokens));
        }
        if !(self.mask_fraction > 0.0 && self.mask_fraction < 1.0) {
            return usage(format!("mask_fraction must lie strictly between 0 and 1, got {}", self.mask_fraction));
        }
        if self.workers == 0 {
            return usage("workers must be at least 1".into());
        }
        if self.timeout_ms == 0 {
            return usage("timeout_ms must be positive".into());
        }
        if let Some(p) = &self.stop_word_list_path {
            if !p.is_file() {
                return usage(format!("stop-word list {} does not exist", p.display()));
            }
        }
        if let Some(e) = &self.endpoint {
            vulnrisk::imputer::Endpoint::from_str(e).map_err(CliError::Usage)?;
        }
        Ok(())
    }

    pub fn stop_words(&self) -> Result<StopWords, CliError> {
        match &self.stop_word_list_path {
            Some(p) => StopWords::load(p).map_err(|e| CliError::io(p, e)),
            None => Ok(StopWords::english_v1()),
        }
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_millis(self.timeout_ms)
    }

    /// The settings that can change results. Output locations and the worker
    /// count are left out.
    pub fn hashed_view(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("plain data");
        let map = v.as_object_mut().expect("struct");
        map.remove("output_dir");
        map.remove("workers");
        v
    }
}
