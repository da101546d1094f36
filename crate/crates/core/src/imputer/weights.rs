//! Inverse-frequency label weights, `w_i = N / F_i`.

use serde::{Deserialize, Serialize};

use super::ImputeError;
use crate::cvss::{Metric, MetricLabel};

/// Label weights for one classification task.
///
/// Labels that never occur (`F_i = 0`) get no weight rather than an infinite
/// one; they are reported by [`LabelWeights::absent`] and the baseline never
/// predicts them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelWeights {
    pub task: Metric,
    pub n_total: usize,
    /// `F_i`, indexed by class (see [`Metric::labels`]).
    pub frequencies: [usize; 3],
    /// `w_i = N / F_i`, `None` where `F_i = 0`.
    pub weights: [Option<f64>; 3],
}

impl LabelWeights {
    /// Weights from per-class counts.
    pub fn from_frequencies(task: Metric, frequencies: [usize; 3]) -> Result<Self, ImputeError> {
        let n_total: usize = frequencies.iter().sum();
        if n_total == 0 {
            return Err(ImputeError::EmptyDataset);
        }
        let weights = frequencies.map(|f| (f > 0).then(|| n_total as f64 / f as f64));
        Ok(Self { task, n_total, frequencies, weights })
    }

    /// Weights from a list of observed class indices (each `< 3`).
    pub fn from_classes(task: Metric, classes: &[usize]) -> Result<Self, ImputeError> {
        let mut frequencies = [0usize; 3];
        for &c in classes {
            *frequencies.get_mut(c).ok_or_else(|| ImputeError::Domain(format!("class index {c} out of range")))? += 1;
        }
        Self::from_frequencies(task, frequencies)
    }

    pub fn weight(&self, class: usize) -> Option<f64> {
        self.weights.get(class).copied().flatten()
    }

    pub fn weight_of(&self, label: MetricLabel) -> Option<f64> {
        self.weight(label.class_index())
    }

    pub fn is_present(&self, class: usize) -> bool {
        self.frequencies.get(class).is_some_and(|f| *f > 0)
    }

    pub fn present_classes(&self) -> usize {
        self.frequencies.iter().filter(|f| **f > 0).count()
    }

    /// Labels with zero frequency.
    pub fn absent(&self) -> Vec<MetricLabel> {
        self.task.labels().into_iter().filter(|l| !self.is_present(l.class_index())).collect()
    }

    /// Weights as a dense slice, with absent classes set to zero.
    pub fn dense(&self) -> [f64; 3] {
        self.weights.map(|w| w.unwrap_or(0.0))
    }
}

/// Computes the weights of one task from its observed labels. Labels of a
/// different metric are rejected.
pub fn compute_label_weights(task: Metric, labels: &[MetricLabel]) -> Result<LabelWeights, ImputeError> {
    if labels.is_empty() {
        return Err(ImputeError::EmptyDataset);
    }
    let classes = labels
        .iter()
        .map(|l| {
            if l.metric() == task {
                Ok(l.class_index())
            } else {
                Err(ImputeError::Domain(format!("label {l} does not belong to task {task}")))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    LabelWeights::from_classes(task, &classes)
}
