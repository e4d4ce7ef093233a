//! Moving-average filters over certain and uncertain series.
//!
//! Windows are `i−w ..= i+w`, truncated at the series edges. The uncertain
//! variants weight each observation by `1/s_j` in the numerator only, as in
//! their original definition; `normalized` divides by the summed weights
//! instead, giving an inverse-std weighted mean.

use serde::{Deserialize, Serialize};

use crate::model::ProbabilisticSeries;

fn window(i: usize, w: usize, n: usize) -> std::ops::RangeInclusive<usize> {
    i.saturating_sub(w)..=(i + w).min(n - 1)
}

// Shared kernel: Σ v_j·k_j·g_j / Σ k_j·h_j over the window, where k is the
// decay weight and g/h are the per-point numerator/denominator factors.
fn weighted(values: &[f64], w: usize, lambda: f64, num: impl Fn(usize) -> f64, den: impl Fn(usize) -> f64) -> Vec<f64> {
    let n = values.len();
    // decay weights by offset; exp(−λ·0) = 1 even for λ = ∞
    let decay: Vec<f64> = (0..=w)
        .map(|d| if d == 0 { 1.0 } else { (-lambda * d as f64).exp() })
        .collect();
    (0..n)
        .map(|i| {
            let (mut top, mut bottom) = (0.0, 0.0);
            for j in window(i, w, n) {
                let k = decay[i.abs_diff(j)];
                top += values[j] * k * num(j);
                bottom += k * den(j);
            }
            top / bottom
        })
        .collect()
}

/// Moving average with edge-truncated windows.
pub fn ma_filter(values: &[f64], w: usize) -> Vec<f64> {
    weighted(values, w, 0.0, |_| 1.0, |_| 1.0)
}

/// Exponentially weighted moving average, weights `exp(−λ|j−i|)`.
pub fn ema_filter(values: &[f64], w: usize, lambda: f64) -> Vec<f64> {
    weighted(values, w, lambda, |_| 1.0, |_| 1.0)
}

/// `Σ (v_j / s_j) / |window|`.
pub fn uma_filter(x: &ProbabilisticSeries, w: usize) -> Vec<f64> {
    let inv = inverse_stds(x);
    weighted(x.observations(), w, 0.0, |j| inv[j], |_| 1.0)
}

/// `Σ v_j e^{−λ|j−i|} / s_j ÷ Σ e^{−λ|j−i|}`.
pub fn uema_filter(x: &ProbabilisticSeries, w: usize, lambda: f64) -> Vec<f64> {
    let inv = inverse_stds(x);
    weighted(x.observations(), w, lambda, |j| inv[j], |_| 1.0)
}

/// `Σ (v_j / s_j) / Σ (1 / s_j)`.
pub fn uma_filter_normalized(x: &ProbabilisticSeries, w: usize) -> Vec<f64> {
    let inv = inverse_stds(x);
    weighted(x.observations(), w, 0.0, |j| inv[j], |j| inv[j])
}

/// `Σ v_j e^{−λ|j−i|} / s_j ÷ Σ e^{−λ|j−i|} / s_j`.
pub fn uema_filter_normalized(x: &ProbabilisticSeries, w: usize, lambda: f64) -> Vec<f64> {
    let inv = inverse_stds(x);
    weighted(x.observations(), w, lambda, |j| inv[j], |j| inv[j])
}

fn inverse_stds(x: &ProbabilisticSeries) -> Vec<f64> {
    x.stds().map(|s| 1.0 / s).collect()
}

/// Window and decay settings shared by UMA and UEMA.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterParams {
    pub w: usize,
    pub lambda: f64,
    /// Divide by the summed inverse-std weights instead of the window size
    /// (UMA) or the summed decay weights (UEMA).
    #[serde(rename = "normalized_uncertain_filters")]
    pub normalized: bool,
}

impl Default for FilterParams {
    fn default() -> Self {
        Self {
            w: 2,
            lambda: 1.0,
            normalized: false,
        }
    }
}

impl FilterParams {
    pub fn validate(&self) -> crate::Result<()> {
        if !(self.lambda >= 0.0) {
            return Err(crate::Error::InvalidParameter(format!(
                "lambda must be non-negative, got {}",
                self.lambda
            )));
        }
        Ok(())
    }

    pub fn uma(&self, x: &ProbabilisticSeries) -> Vec<f64> {
        if self.normalized {
            uma_filter_normalized(x, self.w)
        } else {
            uma_filter(x, self.w)
        }
    }

    pub fn uema(&self, x: &ProbabilisticSeries) -> Vec<f64> {
        if self.normalized {
            uema_filter_normalized(x, self.w, self.lambda)
        } else {
            uema_filter(x, self.w, self.lambda)
        }
    }
}
