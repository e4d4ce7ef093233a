//! Pearson chi-square test of uniformity over pooled dataset values.

use crate::error::{Error, Result};
use crate::model::Dataset;
use crate::special::gamma_q;

/// Smallest pooled value count the test accepts.
pub const MIN_VALUES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub critical: f64,
    pub reject: bool,
}

/// Upper-tail probability of the chi-square law with `dof` degrees of
/// freedom.
pub fn chi_square_sf(x: f64, dof: usize) -> f64 {
    gamma_q(0.5 * dof as f64, 0.5 * x)
}

/// Critical value `x` with `Pr(χ²_dof > x) = alpha`, by bisection.
pub fn chi_square_critical(dof: usize, alpha: f64) -> Result<f64> {
    if dof == 0 {
        return Err(Error::InvalidParameter(
            "chi-square needs at least one degree of freedom".into(),
        ));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    let mut hi = dof as f64 + 10.0;
    while chi_square_sf(hi, dof) > alpha {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if chi_square_sf(mid, dof) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Bin `values` into ⌈√N⌉ equal-width bins over [min, max] and test the
/// counts against a uniform expectation at level `alpha`.
pub fn chi_square_uniformity_values(values: &[f64], alpha: f64) -> Result<ChiSquare> {
    let n = values.len();
    if n < MIN_VALUES {
        return Err(Error::NotEnoughSamples {
            needed: MIN_VALUES,
            got: n,
        });
    }
    let bins = (n as f64).sqrt().ceil() as usize;
    let (min, max) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let width = (max - min) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        let b = if width > 0.0 {
            (((v - min) / width) as usize).min(bins - 1)
        } else {
            0
        };
        counts[b] += 1;
    }
    let expected = n as f64 / bins as f64;
    let statistic = counts.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
    let dof = bins - 1;
    let critical = chi_square_critical(dof, alpha)?;
    Ok(ChiSquare {
        statistic,
        dof,
        critical,
        reject: statistic > critical,
    })
}

pub fn chi_square_uniformity(ds: &Dataset, alpha: f64) -> Result<ChiSquare> {
    let values: Vec<f64> = ds.pooled_values().collect();
    chi_square_uniformity_values(&values, alpha)
}
