use crate::error::{Error, Result};

/// `|d|^p` for the per-timestamp term of an Lp distance.
#[inline]
pub(crate) fn lp_term(d: f64, p: u32) -> f64 {
    match p {
        1 => d.abs(),
        2 => d * d,
        _ => d.abs().powi(p as i32),
    }
}

/// Inverse of summing `lp_term`s: the p-th root.
#[inline]
pub(crate) fn lp_root(sum: f64, p: u32) -> f64 {
    match p {
        1 => sum,
        2 => sum.sqrt(),
        _ => sum.powf(1.0 / p as f64),
    }
}

pub(crate) fn check_p(p: u32) -> Result<()> {
    if p == 0 {
        return Err(Error::InvalidParameter("Lp order must be at least 1".into()));
    }
    Ok(())
}

/// `(Σ|a_i − b_i|^p)^(1/p)`.
pub fn lp_distance(a: &[f64], b: &[f64], p: u32) -> Result<f64> {
    check_p(p)?;
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let sum: f64 = a.iter().zip(b).map(|(x, y)| lp_term(x - y, p)).sum();
    Ok(lp_root(sum, p))
}

/// Squared Euclidean distance. Callers guarantee equal lengths.
#[inline]
pub fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Euclidean distance. Callers guarantee equal lengths.
#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    squared_euclidean(a, b).sqrt()
}
