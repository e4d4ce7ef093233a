//! Retrieval metrics and confidence intervals.

use crate::error::{Error, Result};

/// `(|R ∩ T| / |R|, |R ∩ T| / |T|)`, with precision 0 for an empty `R`.
/// Both inputs are index sets; duplicates are not expected.
pub fn precision_recall(retrieved: &[usize], truth: &[usize]) -> Result<(f64, f64)> {
    if truth.is_empty() {
        return Err(Error::EmptyTruth);
    }
    let hits = retrieved.iter().filter(|i| truth.contains(i)).count() as f64;
    let precision = if retrieved.is_empty() {
        0.0
    } else {
        hits / retrieved.len() as f64
    };
    Ok((precision, hits / truth.len() as f64))
}

/// Harmonic mean of precision and recall; 0 when both are 0.
pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Normal-approximation 95% interval: `(mean, 1.96·s/√n)` with the n−1
/// sample standard deviation.
pub fn confidence_interval_95(samples: &[f64]) -> Result<(f64, f64)> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::NotEnoughSamples { needed: 2, got: n });
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    Ok((mean, 1.96 * var.sqrt() / (n as f64).sqrt()))
}

/// Mean and half-width, with half-width 0 when fewer than two samples
/// exist (and mean 0 for none).
pub fn mean_and_ci(samples: &[f64]) -> (f64, f64) {
    match samples.len() {
        0 => (0.0, 0.0),
        1 => (samples[0], 0.0),
        _ => confidence_interval_95(samples).expect("two or more samples"),
    }
}
