//! Experiment configuration, read from and written to TOML.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::distance::{munich::MIN_BINS, DustConfig, FilterParams, MunichParams, ProudParams};
use crate::error::{Error, Result};
use crate::model::ErrorKind;
use crate::perturbation::{PerturbationSpec, StdSchedule};
use crate::query::Technique;

/// Where to find one UCR dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSource {
    pub name: String,
    pub train: PathBuf,
    pub test: PathBuf,
}

impl DatasetSource {
    /// Conventional archive layout: `<root>/<name>/<name>_{TRAIN,TEST}.txt`.
    pub fn in_archive(root: &Path, name: &str) -> Self {
        let dir = root.join(name);
        Self {
            name: name.to_string(),
            train: dir.join(format!("{name}_TRAIN.txt")),
            test: dir.join(format!("{name}_TEST.txt")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selection {
    /// The first `max_series` series in file order.
    #[default]
    First,
    /// A seeded uniform draw without replacement.
    Random,
}

/// Subsampling and preprocessing applied before perturbation.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataOptions {
    pub max_series: Option<usize>,
    pub selection: Selection,
    /// Keep only the first `truncate` points of every series.
    pub truncate: Option<usize>,
    /// Resample every series to this length.
    pub resample: Option<usize>,
    /// Number of seeded random queries; every series is a query when unset.
    pub queries: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixedStd {
    pub fraction_high: f64,
    pub std_high: f64,
    pub std_low: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerturbationConfig {
    pub kind: ErrorKind,
    pub mix_kinds: Option<Vec<ErrorKind>>,
    /// Replaces the σ grid with a single mixed schedule.
    pub mixed: Option<MixedStd>,
}

impl Default for PerturbationConfig {
    fn default() -> Self {
        Self {
            kind: ErrorKind::Normal,
            mix_kinds: None,
            mixed: None,
        }
    }
}

impl PerturbationConfig {
    /// One spec per σ of the grid, or the single mixed schedule. Seeds are
    /// filled in per series by the runner.
    pub fn specs(&self, sigmas: &[f64]) -> Vec<PerturbationSpec> {
        let schedules: Vec<StdSchedule> = match self.mixed {
            Some(m) => vec![StdSchedule::Mixed {
                fraction_high: m.fraction_high,
                std_high: m.std_high,
                std_low: m.std_low,
            }],
            None => sigmas.iter().map(|&s| StdSchedule::Constant(s)).collect(),
        };
        schedules
            .into_iter()
            .map(|std| PerturbationSpec {
                kind: self.kind,
                mix_kinds: self.mix_kinds.clone(),
                std,
                seed: 0,
            })
            .collect()
    }
}

fn default_seed() -> u64 {
    42
}

/// 0.2, 0.4, …, 2.0.
pub fn default_sigmas() -> Vec<f64> {
    (1..=10).map(|i| (i as f64 * 0.2 * 10.0).round() / 10.0).collect()
}

fn default_time_limit() -> f64 {
    10.0
}

fn default_techniques() -> Vec<Technique> {
    Technique::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_sigmas")]
    pub sigmas: Vec<f64>,
    /// Per-query limit; slower queries are reported as skipped.
    #[serde(default = "default_time_limit")]
    pub time_limit_secs: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Worker threads for the query loop; 1 keeps timings clean.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default = "default_techniques")]
    pub techniques: Vec<Technique>,
    /// Candidate τ values for MUNICH and PROUD; defaults to the extended grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub data: DataOptions,
    #[serde(default)]
    pub perturbation: PerturbationConfig,
    #[serde(default)]
    pub munich: MunichParams,
    #[serde(default)]
    pub proud: ProudParams,
    #[serde(default)]
    pub dust: DustConfig,
    #[serde(default)]
    pub filter: FilterParams,
    #[serde(default, rename = "dataset")]
    pub datasets: Vec<DatasetSource>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: default_seed(),
            sigmas: default_sigmas(),
            time_limit_secs: default_time_limit(),
            output: None,
            threads: None,
            techniques: default_techniques(),
            tau_grid: None,
            data: DataOptions::default(),
            perturbation: PerturbationConfig::default(),
            munich: MunichParams::default(),
            proud: ProudParams::default(),
            dust: DustConfig::default(),
            filter: FilterParams::default(),
            datasets: Vec::new(),
        }
    }
}

fn invalid(message: impl Into<String>) -> Error {
    Error::InvalidParameter(message.into())
}

impl ExperimentConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.validate().map_err(|e| Error::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Ok(cfg)
    }

    /// Read a config file. Relative dataset and output paths are resolved
    /// against the file's directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::parse(&text, path)?;
        let base = path.parent().unwrap_or(Path::new(""));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for d in &mut cfg.datasets {
            fix(&mut d.train);
            fix(&mut d.test);
        }
        if let Some(o) = &mut cfg.output {
            fix(o);
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    pub fn validate(&self) -> Result<()> {
        if self.techniques.is_empty() {
            return Err(invalid("at least one technique is required"));
        }
        if self.perturbation.mixed.is_none() && self.sigmas.is_empty() {
            return Err(invalid("the sigma grid is empty"));
        }
        if let Some(s) = self.sigmas.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
            return Err(invalid(format!("sigma values must be positive, got {s}")));
        }
        for spec in self.perturbation.specs(&self.sigmas) {
            spec.validate()?;
        }
        if !(self.time_limit_secs > 0.0) {
            return Err(invalid("time_limit_secs must be positive"));
        }
        if self.threads == Some(0) {
            return Err(invalid("threads must be at least 1"));
        }
        if let Some(g) = &self.tau_grid {
            if g.is_empty() {
                return Err(invalid("tau_grid is empty"));
            }
            if let Some(t) = g.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
                return Err(Error::InvalidTau(*t));
            }
        }
        if self.munich.bins < MIN_BINS || self.munich.samples == 0 || self.munich.p == 0 {
            return Err(invalid("munich needs bins >= 16, samples >= 1 and p >= 1"));
        }
        if let Some(s) = self.proud.assumed_std {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(invalid(format!("proud.assumed_std must be non-negative, got {s}")));
            }
        }
        self.dust.validate()?;
        self.filter.validate()?;
        let d = &self.data;
        if d.max_series.is_some_and(|m| m < 11) {
            return Err(invalid("max_series must leave at least 10 candidates per query"));
        }
        if d.truncate.is_some_and(|t| t < 2) || d.resample.is_some_and(|t| t < 2) {
            return Err(invalid("truncate and resample lengths must be at least 2"));
        }
        if d.queries == Some(0) {
            return Err(invalid("queries must be at least 1"));
        }
        Ok(())
    }
}
