//! Exact and uncertain time series, plus the preprocessing shared by every
//! technique (z-normalization and resampling).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite {
            index,
            value: values[index],
        }),
        None => Ok(()),
    }
}

/// An exact, equally spaced sequence of finite reals.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        check_finite(&values)?;
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Keep the first `len` points (or the whole series if it is shorter).
    pub fn truncated(&self, len: usize) -> Result<TimeSeries> {
        let len = len.min(self.len());
        TimeSeries::new(self.values[..len].to_vec())
    }
}

impl AsRef<[f64]> for TimeSeries {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// Z-normalize to zero mean and unit population variance.
///
/// A flat series (standard deviation zero up to rounding) maps to all zeros.
pub fn z_normalize(ts: &TimeSeries) -> Result<TimeSeries> {
    let v = ts.values();
    if v.len() < 2 {
        return Err(Error::TooShortToNormalize { len: v.len() });
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    let scale = v.iter().fold(mean.abs(), |m, x| m.max(x.abs())).max(1.0);
    if std <= 1e-12 * scale {
        return Ok(TimeSeries {
            values: vec![0.0; v.len()],
        });
    }
    Ok(TimeSeries {
        values: v.iter().map(|x| (x - mean) / std).collect(),
    })
}

/// Resample onto `target_len` equally spaced positions by linear
/// interpolation. Endpoints are preserved exactly.
pub fn resample(ts: &TimeSeries, target_len: usize) -> Result<TimeSeries> {
    let v = ts.values();
    if v.len() < 2 {
        return Err(Error::Resample(format!(
            "source series has length {}, need at least 2",
            v.len()
        )));
    }
    if target_len < 2 {
        return Err(Error::Resample(format!("target length {target_len} is below 2")));
    }
    if target_len == v.len() {
        return Ok(ts.clone());
    }
    let last = v.len() - 1;
    let step = last as f64 / (target_len - 1) as f64;
    let mut out = Vec::with_capacity(target_len);
    out.push(v[0]);
    for k in 1..target_len - 1 {
        let pos = k as f64 * step;
        let i = (pos.floor() as usize).min(last - 1);
        let frac = pos - i as f64;
        out.push(v[i] + frac * (v[i + 1] - v[i]));
    }
    out.push(v[last]);
    Ok(TimeSeries { values: out })
}

/// Shape of a zero-mean error distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorKind {
    Uniform,
    Normal,
    Exponential,
}

impl ErrorKind {
    pub const ALL: [ErrorKind; 3] = [ErrorKind::Uniform, ErrorKind::Normal, ErrorKind::Exponential];

    pub fn name(self) -> &'static str {
        match self {
            ErrorKind::Uniform => "uniform",
            ErrorKind::Normal => "normal",
            ErrorKind::Exponential => "exponential",
        }
    }

    pub fn parse(s: &str) -> Option<ErrorKind> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Some(ErrorKind::Uniform),
            "normal" | "gaussian" => Some(ErrorKind::Normal),
            "exponential" | "exp" => Some(ErrorKind::Exponential),
            _ => None,
        }
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A zero-mean error distribution with standard deviation `std`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorModel {
    kind: ErrorKind,
    std: f64,
}

impl ErrorModel {
    pub fn new(kind: ErrorKind, std: f64) -> Result<Self> {
        if !(std.is_finite() && std > 0.0) {
            return Err(Error::InvalidStd(std));
        }
        Ok(Self { kind, std })
    }

    pub fn normal(std: f64) -> Result<Self> {
        Self::new(ErrorKind::Normal, std)
    }

    pub fn uniform(std: f64) -> Result<Self> {
        Self::new(ErrorKind::Uniform, std)
    }

    pub fn exponential(std: f64) -> Result<Self> {
        Self::new(ErrorKind::Exponential, std)
    }

    pub fn kind(&self) -> ErrorKind {
        self.kind
    }

    pub fn std(&self) -> f64 {
        self.std
    }

    /// Hashable identity (kind plus the exact bits of `std`).
    pub fn key(&self) -> ModelKey {
        ModelKey(self.kind, self.std.to_bits())
    }

    /// Probability density of the error at `e`.
    pub fn density(&self, e: f64) -> f64 {
        let s = self.std;
        match self.kind {
            ErrorKind::Uniform => {
                let half = s * 3f64.sqrt();
                if e.abs() <= half {
                    0.5 / half
                } else {
                    0.0
                }
            }
            ErrorKind::Normal => {
                let z = e / s;
                (-0.5 * z * z).exp() / (s * (2.0 * std::f64::consts::PI).sqrt())
            }
            ErrorKind::Exponential => {
                // Exp(scale s) shifted left by its mean.
                let t = e + s;
                if t >= 0.0 {
                    (-t / s).exp() / s
                } else {
                    0.0
                }
            }
        }
    }

    /// Interval outside which the density is zero or negligible
    /// (below 1e-30 relative to its peak).
    pub fn support(&self) -> (f64, f64) {
        let s = self.std;
        match self.kind {
            ErrorKind::Uniform => {
                let half = s * 3f64.sqrt();
                (-half, half)
            }
            ErrorKind::Normal => (-12.0 * s, 12.0 * s),
            ErrorKind::Exponential => (-s, 70.0 * s),
        }
    }
}

impl fmt::Display for ErrorModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.kind, self.std)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModelKey(ErrorKind, u64);

/// One observed value and one error model per timestamp.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilisticSeries {
    observations: Vec<f64>,
    errors: Vec<ErrorModel>,
}

impl ProbabilisticSeries {
    pub fn new(observations: Vec<f64>, errors: Vec<ErrorModel>) -> Result<Self> {
        if observations.is_empty() {
            return Err(Error::EmptySeries);
        }
        if observations.len() != errors.len() {
            return Err(Error::LengthMismatch {
                left: observations.len(),
                right: errors.len(),
            });
        }
        check_finite(&observations)?;
        Ok(Self { observations, errors })
    }

    /// Every timestamp shares the same error model.
    pub fn with_constant_error(observations: Vec<f64>, model: ErrorModel) -> Result<Self> {
        let errors = vec![model; observations.len()];
        Self::new(observations, errors)
    }

    pub fn observations(&self) -> &[f64] {
        &self.observations
    }

    pub fn errors(&self) -> &[ErrorModel] {
        &self.errors
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn stds(&self) -> impl Iterator<Item = f64> + '_ {
        self.errors.iter().map(|e| e.std())
    }
}

/// Repeated observations per timestamp.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiObservationSeries {
    samples: Vec<Vec<f64>>,
}

impl MultiObservationSeries {
    pub fn new(samples: Vec<Vec<f64>>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySeries);
        }
        for (index, s) in samples.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::EmptyTimestamp { index });
            }
            check_finite(s)?;
        }
        Ok(Self { samples })
    }

    /// One sample per timestamp.
    pub fn certain(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| vec![v]).collect())
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    pub fn at(&self, i: usize) -> &[f64] {
        &self.samples[i]
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn total_observations(&self) -> usize {
        self.samples.iter().map(Vec::len).sum()
    }

    /// Number of materializations (certain sequences) this series expands to.
    pub fn materializations(&self) -> f64 {
        self.samples.iter().map(|s| s.len() as f64).product()
    }
}

/// A named collection of equal-length series.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    series: Vec<TimeSeries>,
    labels: Option<Vec<f64>>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, series: Vec<TimeSeries>, labels: Option<Vec<f64>>) -> Result<Self> {
        let name = name.into();
        if let Some(first) = series.first() {
            let expected = first.len();
            if let Some((index, s)) = series.iter().enumerate().find(|(_, s)| s.len() != expected) {
                return Err(Error::RaggedDataset {
                    name,
                    index,
                    len: s.len(),
                    expected,
                });
            }
        }
        if let Some(l) = &labels {
            if l.len() != series.len() {
                return Err(Error::LengthMismatch {
                    left: series.len(),
                    right: l.len(),
                });
            }
        }
        Ok(Self { name, series, labels })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn series(&self) -> &[TimeSeries] {
        &self.series
    }

    pub fn labels(&self) -> Option<&[f64]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    /// Length shared by every member series (0 for an empty dataset).
    pub fn series_len(&self) -> usize {
        self.series.first().map_or(0, TimeSeries::len)
    }

    /// Keep the members at `indices`, in the given order.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            series: indices.iter().map(|&i| self.series[i].clone()).collect(),
            labels: self.labels.as_ref().map(|l| indices.iter().map(|&i| l[i]).collect()),
        }
    }

    pub fn map_series(&self, f: impl Fn(&TimeSeries) -> Result<TimeSeries>) -> Result<Dataset> {
        let series = self.series.iter().map(f).collect::<Result<Vec<_>>>()?;
        Dataset::new(self.name.clone(), series, self.labels.clone())
    }

    pub fn z_normalized(&self) -> Result<Dataset> {
        self.map_series(z_normalize)
    }

    /// All values of all series, in order.
    pub fn pooled_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.series.iter().flat_map(|s| s.values().iter().copied())
    }
}
