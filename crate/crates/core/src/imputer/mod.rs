//! Imputation of missing CVSS v2 labels from description text.
//!
//! Each of the six metrics is an independent three-class task. Two
//! [`Imputer`] implementations ship here: the built-in [`baseline`] model and
//! a client for an [`external`] model server. [`PerfectOracle`] returns known
//! ground truth and exists for evaluating the rest of the pipeline.

pub mod baseline;
pub mod external;
pub mod loss;
pub mod weights;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cve::CveId;
use crate::cvss::{Cvss2Vector, Metric, MetricLabel};
use crate::text::TextError;

pub use baseline::{train_baseline, BaselineConfig, BaselineModel, TrainingOutcome};
pub use external::{Endpoint, ExternalModel};
pub use loss::{cross_entropy, weighted_cross_entropy};
pub use weights::{compute_label_weights, LabelWeights};

/// Descriptions with fewer content tokens than this are predicted but flagged.
pub const LOW_CONFIDENCE_MIN_TOKENS: usize = 8;

#[derive(Debug, Error)]
pub enum ImputeError {
    #[error(transparent)]
    Text(#[from] TextError),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("invalid loss input: {0}")]
    Domain(String),
    #[error("model server protocol error: {0}")]
    Protocol(String),
    #[error("model server did not answer within {0:?}")]
    Timeout(std::time::Duration),
    #[error("model server unreachable: {0}")]
    Unreachable(String),
    #[error("model returned illegal label {label:?} for {metric}")]
    IllegalLabel { metric: Metric, label: String },
    #[error("no ground truth known for {0}")]
    UnknownCve(CveId),
    #[error("model file: {0}")]
    ModelFormat(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PredictionSource {
    Baseline,
    ExternalModel,
    GroundTruth,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricPrediction {
    pub label: MetricLabel,
    /// Top-class confidence in `[0, 1]`.
    pub confidence: f64,
}

/// A predicted label for every metric of one CVE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPrediction")]
pub struct Prediction {
    cve_id: CveId,
    metrics: [MetricPrediction; 6],
    source: PredictionSource,
    low_confidence: bool,
}

#[derive(Deserialize)]
struct RawPrediction {
    cve_id: CveId,
    metrics: Vec<MetricPrediction>,
    source: PredictionSource,
    low_confidence: bool,
}

impl TryFrom<RawPrediction> for Prediction {
    type Error = String;

    fn try_from(raw: RawPrediction) -> Result<Self, Self::Error> {
        let metrics: [MetricPrediction; 6] =
            raw.metrics.try_into().map_err(|v: Vec<_>| format!("expected 6 metrics, found {}", v.len()))?;
        Prediction::new(raw.cve_id, metrics, raw.source, raw.low_confidence)
    }
}

impl Prediction {
    /// `metrics` must be in canonical metric order with confidences in `[0, 1]`.
    pub fn new(
        cve_id: CveId,
        metrics: [MetricPrediction; 6],
        source: PredictionSource,
        low_confidence: bool,
    ) -> Result<Self, String> {
        for (expected, m) in Metric::ALL.into_iter().zip(&metrics) {
            if m.label.metric() != expected {
                return Err(format!("slot for {expected} holds a {} label", m.label.metric()));
            }
            if !(0.0..=1.0).contains(&m.confidence) {
                return Err(format!("confidence {} for {expected} outside [0, 1]", m.confidence));
            }
        }
        Ok(Self { cve_id, metrics, source, low_confidence })
    }

    /// Prediction carrying the labels of a complete vector with confidence 1.
    pub fn from_vector(cve_id: CveId, vector: &Cvss2Vector, source: PredictionSource) -> Option<Self> {
        let mut metrics = [MetricPrediction { label: Metric::AccessVector.labels()[0], confidence: 1.0 }; 6];
        for (slot, metric) in metrics.iter_mut().zip(Metric::ALL) {
            slot.label = vector.get(metric)?;
        }
        Some(Self { cve_id, metrics, source, low_confidence: false })
    }

    pub fn cve_id(&self) -> &CveId {
        &self.cve_id
    }

    pub fn source(&self) -> PredictionSource {
        self.source
    }

    pub fn low_confidence(&self) -> bool {
        self.low_confidence
    }

    pub fn get(&self, metric: Metric) -> MetricPrediction {
        self.metrics[metric.index()]
    }

    pub fn metrics(&self) -> &[MetricPrediction; 6] {
        &self.metrics
    }

    /// The predicted labels as a complete vector.
    pub fn vector(&self) -> Cvss2Vector {
        let mut v = Cvss2Vector::missing();
        for m in &self.metrics {
            v.set(m.label);
        }
        v
    }
}

/// Anything that can fill in CVSS v2 labels from a description.
pub trait Imputer: Send + Sync {
    fn predict(&self, cve_id: &CveId, description: &str) -> Result<Prediction, ImputeError>;

    /// Predicts many descriptions. Implementations may pipeline requests;
    /// results are returned in input order.
    fn predict_many(&self, items: &[(CveId, String)]) -> Vec<Result<Prediction, ImputeError>> {
        items.iter().map(|(id, text)| self.predict(id, text)).collect()
    }

    fn source(&self) -> PredictionSource;
}

/// Returns the hidden ground truth for every CVE it was built with.
#[derive(Debug, Clone, Default)]
pub struct PerfectOracle {
    truth: HashMap<CveId, Cvss2Vector>,
}

impl PerfectOracle {
    /// Only complete vectors are kept.
    pub fn new(truth: impl IntoIterator<Item = (CveId, Cvss2Vector)>) -> Self {
        Self { truth: truth.into_iter().filter(|(_, v)| v.is_complete()).collect() }
    }

    pub fn len(&self) -> usize {
        self.truth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.truth.is_empty()
    }
}

impl Imputer for PerfectOracle {
    fn predict(&self, cve_id: &CveId, _description: &str) -> Result<Prediction, ImputeError> {
        let vector = self.truth.get(cve_id).ok_or_else(|| ImputeError::UnknownCve(cve_id.clone()))?;
        Ok(Prediction::from_vector(cve_id.clone(), vector, PredictionSource::GroundTruth)
            .expect("oracle keeps only complete vectors"))
    }

    fn source(&self) -> PredictionSource {
        PredictionSource::GroundTruth
    }
}
