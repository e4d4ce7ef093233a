//! MUNICH: probability that the Lp distance between two sample-based
//! uncertain series is within ε, counted over all materializations.
//!
//! Two routes are provided. [`munich_probability_exact`] enumerates every
//! combination of one sample per timestamp from each series. It is only
//! feasible for tiny instances. [`munich_probability_dp`] uses the
//! independence of timestamps: the distance is a sum of per-timestamp terms,
//! so the count of combinations with sum ≤ εᵖ is a convolution of the
//! per-timestamp term histograms. Quantizing terms down and up onto a grid
//! brackets the exact probability.

use serde::{Deserialize, Serialize};

use crate::distance::lp::{check_p, lp_root, lp_term};
use crate::error::{Error, Result};
use crate::model::MultiObservationSeries;

pub const DEFAULT_EXACT_CAP: u64 = 100_000_000;
pub const DEFAULT_BINS: usize = 1024;
pub const MIN_BINS: usize = 16;

/// Lower and upper bounds on every materialized Lp distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MunichBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Certified bracket around the MUNICH probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MunichEnclosure {
    pub lower: f64,
    pub upper: f64,
}

impl MunichEnclosure {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, p: f64) -> bool {
        self.lower <= p && p <= self.upper
    }
}

fn check_lengths(x: &MultiObservationSeries, y: &MultiObservationSeries) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(())
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    Ok(())
}

fn min_max(s: &[f64]) -> (f64, f64) {
    s.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    })
}

/// Bounds from the per-timestamp minimal bounding intervals of the samples.
pub fn munich_bounds(x: &MultiObservationSeries, y: &MultiObservationSeries, p: u32) -> Result<MunichBounds> {
    check_p(p)?;
    check_lengths(x, y)?;
    let (mut lo, mut hi) = (0.0, 0.0);
    for (xs, ys) in x.samples().iter().zip(y.samples()) {
        let (xl, xh) = min_max(xs);
        let (yl, yh) = min_max(ys);
        let gap = (yl - xh).max(xl - yh).max(0.0);
        let span = (xh - yl).abs().max((yh - xl).abs());
        lo += lp_term(gap, p);
        hi += lp_term(span, p);
    }
    Ok(MunichBounds {
        lower: lp_root(lo, p),
        upper: lp_root(hi, p),
    })
}

fn combination_count(x: &MultiObservationSeries, y: &MultiObservationSeries) -> f64 {
    x.samples()
        .iter()
        .zip(y.samples())
        .map(|(a, b)| (a.len() * b.len()) as f64)
        .product()
}

fn timestamp_terms(xs: &[f64], ys: &[f64], p: u32) -> Vec<f64> {
    let mut t = Vec::with_capacity(xs.len() * ys.len());
    for v in xs {
        for w in ys {
            t.push(lp_term(v - w, p));
        }
    }
    t
}

/// Exact probability by enumerating every materialization pair.
pub fn munich_probability_exact(
    x: &MultiObservationSeries,
    y: &MultiObservationSeries,
    eps: f64,
    p: u32,
    cap: u64,
) -> Result<f64> {
    check_p(p)?;
    check_lengths(x, y)?;
    check_eps(eps)?;
    let total = combination_count(x, y);
    if total > cap as f64 {
        return Err(Error::TooLargeForExact {
            combinations: total,
            cap,
        });
    }
    let terms: Vec<Vec<f64>> = x
        .samples()
        .iter()
        .zip(y.samples())
        .map(|(a, b)| timestamp_terms(a, b, p))
        .collect();

    fn walk(terms: &[Vec<f64>], partial: f64, eps: f64, p: u32) -> u64 {
        match terms.split_first() {
            None => u64::from(lp_root(partial, p) <= eps),
            Some((head, rest)) => head.iter().map(|t| walk(rest, partial + t, eps, p)).sum(),
        }
    }

    let hits = walk(&terms, 0.0, eps, p);
    Ok(hits as f64 / total)
}

/// Bracketed probability via quantized convolution over `bins` grid cells
/// spanning `[0, εᵖ]`, with one absorbing overflow cell.
pub fn munich_probability_dp(
    x: &MultiObservationSeries,
    y: &MultiObservationSeries,
    eps: f64,
    p: u32,
    bins: usize,
) -> Result<MunichEnclosure> {
    check_p(p)?;
    check_lengths(x, y)?;
    check_eps(eps)?;
    if bins < MIN_BINS {
        return Err(Error::InvalidParameter(format!(
            "bins must be at least {MIN_BINS}, got {bins}"
        )));
    }
    let eps_p = lp_term(eps, p);
    let overflow = bins + 1;
    let scale = bins as f64;
    // Integer multiplicities stay exact in f64 up to 2^53; past that, weights
    // are normalized per timestamp instead.
    let exact_counts = combination_count(x, y) <= 9_007_199_254_740_992.0;

    let mut down = vec![0.0f64; bins + 2];
    let mut up = vec![0.0f64; bins + 2];
    down[0] = 1.0;
    up[0] = 1.0;
    let mut next = vec![0.0f64; bins + 2];
    let mut hist_down: Vec<(usize, f64)> = Vec::new();
    let mut hist_up: Vec<(usize, f64)> = Vec::new();

    for (xs, ys) in x.samples().iter().zip(y.samples()) {
        let weight = if exact_counts {
            1.0
        } else {
            1.0 / (xs.len() * ys.len()) as f64
        };
        hist_down.clear();
        hist_up.clear();
        for v in xs {
            for w in ys {
                // Multiply before dividing so that doubling `bins` doubles
                // the ratio exactly and the grids nest.
                let r = lp_term(v - w, p) * scale / eps_p;
                let cell = |c: f64| if c >= overflow as f64 { overflow } else { c as usize };
                hist_down.push((cell(r.floor()), weight));
                hist_up.push((cell(r.ceil()), weight));
            }
        }
        convolve(&mut down, &mut next, merge_cells(&mut hist_down));
        convolve(&mut up, &mut next, merge_cells(&mut hist_up));
    }

    let norm = if exact_counts { combination_count(x, y) } else { 1.0 };
    let within = |d: &[f64]| d[..=bins].iter().sum::<f64>() / norm;
    let lower = within(&up).clamp(0.0, 1.0);
    let upper = within(&down).clamp(0.0, 1.0);
    Ok(MunichEnclosure { lower, upper })
}

fn merge_cells(h: &mut Vec<(usize, f64)>) -> &[(usize, f64)] {
    h.sort_unstable_by_key(|&(c, _)| c);
    h.dedup_by(|b, a| {
        if a.0 == b.0 {
            a.1 += b.1;
            true
        } else {
            false
        }
    });
    h
}

fn convolve(dist: &mut Vec<f64>, scratch: &mut Vec<f64>, hist: &[(usize, f64)]) {
    let overflow = dist.len() - 1;
    scratch.iter_mut().for_each(|v| *v = 0.0);
    for (k, &mass) in dist.iter().enumerate() {
        if mass == 0.0 {
            continue;
        }
        if k == overflow {
            let total: f64 = hist.iter().map(|&(_, m)| m).sum();
            scratch[overflow] += mass * total;
            continue;
        }
        for &(c, m) in hist {
            scratch[(k + c).min(overflow)] += mass * m;
        }
    }
    std::mem::swap(dist, scratch);
}

/// How MUNICH probabilities are computed inside queries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MunichParams {
    pub p: u32,
    /// Grid cells for the convolution route.
    pub bins: usize,
    /// Instances with at most this many materializations are enumerated
    /// exactly; larger ones use the convolution midpoint.
    pub exact_cap: u64,
    /// Samples per timestamp when perturbing ground truth for MUNICH.
    pub samples: usize,
}

impl Default for MunichParams {
    fn default() -> Self {
        Self {
            p: 2,
            bins: DEFAULT_BINS,
            exact_cap: 1_000_000,
            samples: 5,
        }
    }
}

impl MunichParams {
    /// Probability with the bounding-interval prefilter applied first.
    pub fn probability(&self, x: &MultiObservationSeries, y: &MultiObservationSeries, eps: f64) -> Result<f64> {
        let b = munich_bounds(x, y, self.p)?;
        if b.upper <= eps {
            return Ok(1.0);
        }
        if b.lower > eps {
            return Ok(0.0);
        }
        self.probability_unfiltered(x, y, eps)
    }

    pub fn probability_unfiltered(
        &self,
        x: &MultiObservationSeries,
        y: &MultiObservationSeries,
        eps: f64,
    ) -> Result<f64> {
        if combination_count(x, y) <= self.exact_cap as f64 {
            munich_probability_exact(x, y, eps, self.p, self.exact_cap)
        } else {
            Ok(munich_probability_dp(x, y, eps, self.p, self.bins)?.midpoint())
        }
    }
}
