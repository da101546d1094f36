//! Accuracy, precision, recall and F1 for single-label multi-class tasks.

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::cvss::{Metric, MetricLabel};

/// `matrix[true][predicted]` counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub matrix: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn from_classes(n_classes: usize, truth: &[usize], predicted: &[usize]) -> Result<Self, EvalError> {
        if truth.len() != predicted.len() {
            return Err(EvalError::LengthMismatch { truth: truth.len(), predicted: predicted.len() });
        }
        if truth.is_empty() {
            return Err(EvalError::EmptyInput);
        }
        let mut matrix = vec![vec![0usize; n_classes]; n_classes];
        for (&t, &p) in truth.iter().zip(predicted) {
            if t >= n_classes || p >= n_classes {
                return Err(EvalError::ClassOutOfRange { class: t.max(p), n_classes });
            }
            matrix[t][p] += 1;
        }
        Ok(Self { matrix })
    }

    pub fn n_classes(&self) -> usize {
        self.matrix.len()
    }

    pub fn total(&self) -> usize {
        self.matrix.iter().flatten().sum()
    }

    pub fn true_positives(&self, class: usize) -> usize {
        self.matrix[class][class]
    }

    /// Samples whose true class is `class`.
    pub fn support(&self, class: usize) -> usize {
        self.matrix[class].iter().sum()
    }

    pub fn predicted_count(&self, class: usize) -> usize {
        self.matrix.iter().map(|row| row[class]).sum()
    }
}

/// Metrics of one classification task. Weighted averages weight each class
/// by its true support; classes never predicted count as precision 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskMetrics {
    pub accuracy: f64,
    pub precision_weighted: f64,
    pub recall_weighted: f64,
    pub f1_weighted: f64,
    pub f1_micro: f64,
    pub support: usize,
    pub confusion: ConfusionMatrix,
}

impl TaskMetrics {
    pub fn from_confusion(confusion: ConfusionMatrix) -> Self {
        let total = confusion.total() as f64;
        let correct: usize = (0..confusion.n_classes()).map(|k| confusion.true_positives(k)).sum();
        let accuracy = correct as f64 / total;

        let (mut precision, mut recall, mut f1) = (0.0, 0.0, 0.0);
        for k in 0..confusion.n_classes() {
            let support = confusion.support(k);
            if support == 0 {
                continue;
            }
            let tp = confusion.true_positives(k) as f64;
            let predicted = confusion.predicted_count(k);
            let p = if predicted == 0 { 0.0 } else { tp / predicted as f64 };
            let r = tp / support as f64;
            let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
            let share = support as f64 / total;
            precision += share * p;
            recall += share * r;
            f1 += share * f;
        }

        // Micro-averaged precision and recall are both correct / total, so
        // their harmonic mean is too.
        let (tp_sum, fp_sum) = (0..confusion.n_classes()).fold((0usize, 0usize), |(tp, fp), k| {
            let t = confusion.true_positives(k);
            (tp + t, fp + confusion.predicted_count(k) - t)
        });
        let fn_sum: usize = (0..confusion.n_classes()).map(|k| confusion.support(k) - confusion.true_positives(k)).sum();
        let micro_p = tp_sum as f64 / (tp_sum + fp_sum) as f64;
        let micro_r = tp_sum as f64 / (tp_sum + fn_sum) as f64;
        let f1_micro = if micro_p + micro_r == 0.0 { 0.0 } else { 2.0 * micro_p * micro_r / (micro_p + micro_r) };

        Self {
            accuracy,
            precision_weighted: precision,
            recall_weighted: recall,
            f1_weighted: f1,
            f1_micro,
            support: confusion.total(),
            confusion,
        }
    }

    pub fn from_classes(n_classes: usize, truth: &[usize], predicted: &[usize]) -> Result<Self, EvalError> {
        ConfusionMatrix::from_classes(n_classes, truth, predicted).map(Self::from_confusion)
    }
}

/// Metrics for one CVSS task.
pub fn classification_metrics(
    task: Metric,
    truth: &[MetricLabel],
    predicted: &[MetricLabel],
) -> Result<TaskMetrics, EvalError> {
    let classes = |labels: &[MetricLabel]| {
        labels
            .iter()
            .map(|l| {
                if l.metric() == task {
                    Ok(l.class_index())
                } else {
                    Err(EvalError::WrongTask { task, label: *l })
                }
            })
            .collect::<Result<Vec<_>, _>>()
    };
    TaskMetrics::from_classes(Metric::N_LABELS, &classes(truth)?, &classes(predicted)?)
}

/// Test-set metrics for the six tasks, in canonical metric order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub tasks: Vec<(Metric, TaskMetrics)>,
}

impl ClassificationReport {
    pub fn get(&self, metric: Metric) -> Option<&TaskMetrics> {
        self.tasks.iter().find(|(m, _)| *m == metric).map(|(_, t)| t)
    }

    pub fn mean_accuracy(&self) -> f64 {
        self.tasks.iter().map(|(_, t)| t.accuracy).sum::<f64>() / self.tasks.len().max(1) as f64
    }
}
