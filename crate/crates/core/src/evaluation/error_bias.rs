//! Percentage error `|t - p| / t * 100` and bias `t - p` of score pairs.

use serde::{Deserialize, Serialize};

/// Percentage error, or `None` when the true value is zero (undefined).
pub fn percentage_error(true_value: f64, predicted_value: f64) -> Option<f64> {
    if true_value == 0.0 {
        None
    } else {
        Some((true_value - predicted_value).abs() / true_value * 100.0)
    }
}

/// Positive when the prediction underestimates, negative when it overestimates.
pub fn bias(true_value: f64, predicted_value: f64) -> f64 {
    true_value - predicted_value
}

/// Running mean of percentage errors that skips undefined pairs and counts them.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorAccumulator {
    sum: f64,
    n: usize,
    pub zero_true_excluded: usize,
}

impl ErrorAccumulator {
    pub fn push(&mut self, true_value: f64, predicted_value: f64) -> Option<f64> {
        let e = percentage_error(true_value, predicted_value);
        match e {
            Some(e) => {
                self.sum += e;
                self.n += 1;
            }
            None => self.zero_true_excluded += 1,
        }
        e
    }

    pub fn count(&self) -> usize {
        self.n
    }

    pub fn mean(&self) -> Option<f64> {
        (self.n > 0).then(|| self.sum / self.n as f64)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BiasAccumulator {
    sum: f64,
    n: usize,
}

impl BiasAccumulator {
    pub fn push(&mut self, true_value: f64, predicted_value: f64) -> f64 {
        let b = bias(true_value, predicted_value);
        self.sum += b;
        self.n += 1;
        b
    }

    pub fn mean(&self) -> Option<f64> {
        (self.n > 0).then(|| self.sum / self.n as f64)
    }
}
