//! Classification metrics, score error and bias, dataset splitting and the
//! masked-ground-truth experiment.

pub mod error_bias;
pub mod masking;
pub mod metrics;
pub mod split;

use thiserror::Error;

use crate::cve::CveId;
use crate::cvss::{Metric, MetricLabel};

pub use error_bias::{bias, percentage_error};
pub use masking::{masking_experiment, ErrorBiasRow, MaskingOutcome};
pub use metrics::{classification_metrics, ClassificationReport, ConfusionMatrix, TaskMetrics};
pub use split::{split_dataset, Split, SplitIndices, SplitRatios};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("split ratios {0:?} must be non-negative and sum to 1")]
    InvalidRatios(SplitRatios),
    #[error("{truth} true labels but {predicted} predictions")]
    LengthMismatch { truth: usize, predicted: usize },
    #[error("no samples to evaluate")]
    EmptyInput,
    #[error("class {class} outside 0..{n_classes}")]
    ClassOutOfRange { class: usize, n_classes: usize },
    #[error("label {label} does not belong to task {task}")]
    WrongTask { task: Metric, label: MetricLabel },
    #[error("mask fraction {0} must lie in [0, 1]")]
    InvalidMaskFraction(f64),
    #[error("{0} has an incomplete vector and cannot serve as ground truth")]
    IncompleteRecord(CveId),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
