//! Cross-entropy losses over a probability vector.

use super::ImputeError;

/// Probability floor applied before taking the logarithm.
pub const PROB_FLOOR: f64 = 1e-12;
const SUM_TOLERANCE: f64 = 1e-6;

fn check_distribution(probs: &[f64], true_class: usize) -> Result<(), ImputeError> {
    if true_class >= probs.len() {
        return Err(ImputeError::Domain(format!("true class {true_class} outside {} classes", probs.len())));
    }
    if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(ImputeError::Domain(format!("probabilities must be finite and non-negative: {probs:?}")));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(ImputeError::Domain(format!("probabilities sum to {sum}, not 1")));
    }
    if probs[true_class] <= 0.0 {
        return Err(ImputeError::Domain("true-class probability is zero".into()));
    }
    Ok(())
}

/// `-w_true * ln(p_true)`: the one-hot form of `-sum(true * w_i * ln(p_i))`.
pub fn weighted_cross_entropy(probs: &[f64], true_class: usize, weights: &[f64]) -> Result<f64, ImputeError> {
    check_distribution(probs, true_class)?;
    if weights.len() != probs.len() {
        return Err(ImputeError::Domain(format!("{} weights for {} classes", weights.len(), probs.len())));
    }
    let w = weights[true_class];
    if !w.is_finite() || w < 0.0 {
        return Err(ImputeError::Domain(format!("weight {w} for true class is not a finite non-negative number")));
    }
    Ok(-w * probs[true_class].max(PROB_FLOOR).ln())
}

/// Unweighted `-sum(true_i * ln(p_i))` with a one-hot target.
pub fn cross_entropy(probs: &[f64], true_class: usize) -> Result<f64, ImputeError> {
    check_distribution(probs, true_class)?;
    Ok(-probs
        .iter()
        .enumerate()
        .map(|(i, p)| if i == true_class { p.max(PROB_FLOOR).ln() } else { 0.0 })
        .sum::<f64>())
}

/// Numerically stable softmax over the classes where `mask` is true; masked
/// out classes get probability zero.
pub(crate) fn masked_softmax(logits: &[f64; 3], mask: &[bool; 3]) -> [f64; 3] {
    let max = logits
        .iter()
        .zip(mask)
        .filter(|(_, m)| **m)
        .map(|(z, _)| *z)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut out = [0.0; 3];
    let mut total = 0.0;
    for k in 0..3 {
        if mask[k] {
            out[k] = (logits[k] - max).exp();
            total += out[k];
        }
    }
    for p in &mut out {
        *p /= total;
    }
    out
}
