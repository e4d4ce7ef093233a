//! Choosing the probability threshold τ for MUNICH and PROUD.

use crate::error::{Error, Result};
use crate::eval::metrics::{f1, precision_recall};
use crate::query::Technique;
use crate::special::{inverse_normal_cdf, normal_cdf};

/// One query's candidate scores together with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredQuery {
    pub truth: Vec<usize>,
    /// `(collection index, score)`: a probability for MUNICH, `ε_norm` for
    /// PROUD.
    pub scores: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Retrieval {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Retrieval {
    pub fn score(retrieved: &[usize], truth: &[usize]) -> Result<Self> {
        let (precision, recall) = precision_recall(retrieved, truth)?;
        Ok(Self {
            precision,
            recall,
            f1: f1(precision, recall),
        })
    }
}

/// Mean metrics over queries at one τ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauPoint {
    pub tau: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TauSweep {
    pub best: TauPoint,
    pub curve: Vec<TauPoint>,
}

/// 0.05, 0.10, …, 0.95.
pub fn default_tau_grid() -> Vec<f64> {
    (1..=19).map(|i| i as f64 * 0.05).collect()
}

/// The default grid preceded by `Φ(z)` for z = −15, −14.95, …, −1.65.
///
/// PROUD compares a perturbed query with perturbed candidates, so the
/// expected squared distance carries the noise of both sides and its
/// normalized threshold drifts to large negative values as σ or the length
/// grows. Without the small τ values PROUD returns nothing at high noise.
pub fn extended_tau_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (0..=267).map(|i| normal_cdf(-15.0 + 0.05 * i as f64)).collect();
    grid.extend(default_tau_grid());
    grid
}

/// The score a candidate needs to pass τ.
pub fn score_limit(technique: Technique, tau: f64) -> Result<f64> {
    match technique {
        Technique::Munich => {
            if !(tau > 0.0 && tau < 1.0) {
                return Err(Error::InvalidTau(tau));
            }
            Ok(tau)
        }
        Technique::Proud => inverse_normal_cdf(tau),
        t => Err(Error::TechniqueMismatch {
            technique: t.to_string(),
            reason: "only munich and proud take a probability threshold".into(),
        }),
    }
}

/// Per-query retrieval at a fixed τ.
pub fn evaluate_at(queries: &[ScoredQuery], technique: Technique, tau: f64) -> Result<Vec<Retrieval>> {
    let limit = score_limit(technique, tau)?;
    queries
        .iter()
        .map(|q| {
            let retrieved: Vec<usize> = q.scores.iter().filter(|s| s.1 >= limit).map(|s| s.0).collect();
            Retrieval::score(&retrieved, &q.truth)
        })
        .collect()
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        s / n as f64
    }
}

/// Mean F1 at every τ of `grid`; the best point maximizes mean F1, ties
/// going to the smaller τ.
pub fn tau_sweep(queries: &[ScoredQuery], technique: Technique, grid: &[f64]) -> Result<TauSweep> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("tau grid is empty".into()));
    }
    let mut order: Vec<f64> = grid.to_vec();
    order.sort_by(f64::total_cmp);
    order.dedup();
    let mut curve = Vec::with_capacity(order.len());
    for &tau in &order {
        let r = evaluate_at(queries, technique, tau)?;
        curve.push(TauPoint {
            tau,
            precision: mean(r.iter().map(|x| x.precision)),
            recall: mean(r.iter().map(|x| x.recall)),
            f1: mean(r.iter().map(|x| x.f1)),
        });
    }
    let mut best = curve[0];
    for p in &curve[1..] {
        if p.f1 > best.f1 {
            best = *p;
        }
    }
    Ok(TauSweep { best, curve })
}
