//! Seeded shuffle-then-slice train/validation/test partitioning.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EvalError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        Self { train: 0.8, validation: 0.1, test: 0.1 }
    }
}

impl SplitRatios {
    pub fn new(train: f64, validation: f64, test: f64) -> Result<Self, EvalError> {
        let ratios = Self { train, validation, test };
        ratios.validate()?;
        Ok(ratios)
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        let parts = [self.train, self.validation, self.test];
        if parts.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(EvalError::InvalidRatios(*self));
        }
        if (parts.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(EvalError::InvalidRatios(*self));
        }
        Ok(())
    }

    /// `(train, validation, test)` sizes for `n` items. Train and validation
    /// are rounded to the nearest integer; test takes the remainder.
    pub fn counts(&self, n: usize) -> (usize, usize, usize) {
        let train = ((n as f64 * self.train).round() as usize).min(n);
        let validation = ((n as f64 * self.validation).round() as usize).min(n - train);
        (train, validation, n - train - validation)
    }
}

/// Positions into the original sequence for each partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

impl SplitIndices {
    pub fn compute(n: usize, ratios: SplitRatios, seed: u64) -> Result<Self, EvalError> {
        ratios.validate()?;
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let (n_train, n_val, _) = ratios.counts(n);
        let test = order.split_off(n_train + n_val);
        let validation = order.split_off(n_train);
        Ok(Self { train: order, validation, test })
    }

    pub fn select<T: Clone>(&self, items: &[T]) -> Split<T> {
        let pick = |idx: &[usize]| idx.iter().map(|&i| items[i].clone()).collect();
        Split { train: pick(&self.train), validation: pick(&self.validation), test: pick(&self.test) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split<T> {
    pub train: Vec<T>,
    pub validation: Vec<T>,
    pub test: Vec<T>,
}

/// Shuffles `items` with `seed` and slices them by `ratios`.
pub fn split_dataset<T: Clone>(items: &[T], ratios: SplitRatios, seed: u64) -> Result<Split<T>, EvalError> {
    Ok(SplitIndices::compute(items.len(), ratios, seed)?.select(items))
}
