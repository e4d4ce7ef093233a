//! One-parameter sweeps built on the experiment runner.

use std::fmt;
use std::str::FromStr;

use crate::distance::DustTables;
use crate::error::{Error, Result};
use crate::eval::config::ExperimentConfig;
use crate::eval::report::EvalReport;
use crate::eval::runner::{aggregate, prepare_dataset, run_spec};
use crate::model::Dataset;
use crate::query::Technique;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// UMA/UEMA half-window.
    W,
    /// UEMA decay.
    Lambda,
    /// Series length after resampling.
    Length,
    /// MUNICH/PROUD probability threshold.
    Tau,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::W => "w",
            SweepParam::Lambda => "lambda",
            SweepParam::Length => "length",
            SweepParam::Tau => "tau",
        }
    }

    /// Default values: w 0..=20, a handful of decays, lengths 50..1000,
    /// and the configured τ grid.
    pub fn default_values(self, config: &ExperimentConfig) -> Vec<f64> {
        match self {
            SweepParam::W => (0..=20).map(f64::from).collect(),
            SweepParam::Lambda => vec![0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0],
            SweepParam::Length => [50, 100, 200, 300, 400, 500, 600, 700, 800, 900, 1000]
                .map(f64::from)
                .to_vec(),
            SweepParam::Tau => config.effective_tau_grid(),
        }
    }

    /// Techniques the parameter affects, restricted to the configured ones
    /// when that leaves any.
    pub fn techniques(self, config: &ExperimentConfig) -> Vec<Technique> {
        let affected: &[Technique] = match self {
            SweepParam::W => &[Technique::Uma, Technique::Uema],
            SweepParam::Lambda => &[Technique::Uema],
            SweepParam::Length => return config.techniques.clone(),
            SweepParam::Tau => &[Technique::Munich, Technique::Proud],
        };
        let chosen: Vec<Technique> = affected
            .iter()
            .copied()
            .filter(|t| config.techniques.contains(t))
            .collect();
        if chosen.is_empty() {
            affected.to_vec()
        } else {
            chosen
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "w" | "window" => Ok(SweepParam::W),
            "lambda" => Ok(SweepParam::Lambda),
            "length" | "len" => Ok(SweepParam::Length),
            "tau" => Ok(SweepParam::Tau),
            _ => Err(Error::InvalidParameter(format!("unknown sweep parameter `{s}`"))),
        }
    }
}

/// Run the experiment once per value; every cell's `param` is the swept
/// value. A τ sweep runs each spec once and re-scores at every τ.
pub fn parameter_sweep(
    config: &ExperimentConfig,
    datasets: &[Dataset],
    param: SweepParam,
    values: &[f64],
) -> Result<EvalReport> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("no sweep values".into()));
    }
    let mut base = config.clone();
    base.techniques = param.techniques(config);
    base.validate()?;
    let mut report = EvalReport::default();
    for ds in datasets {
        if param == SweepParam::Tau {
            let prep = prepare_dataset(ds, &base.data, base.seed)?;
            let tables = DustTables::new(base.dust)?;
            for spec in base.perturbation.specs(&base.sigmas) {
                let (_, outcomes) = run_spec(&base, &prep, &spec, &tables)?;
                for &tau in values {
                    let mut cells = aggregate(&prep.name, &spec, &base.techniques, &outcomes, &[tau])?;
                    for c in &mut cells {
                        c.param = Some(tau);
                    }
                    report.extend(EvalReport::new(cells));
                }
            }
            continue;
        }
        for &v in values {
            let mut cfg = base.clone();
            match param {
                SweepParam::W => {
                    if v < 0.0 || v.fract() != 0.0 {
                        return Err(Error::InvalidParameter(format!(
                            "w must be a non-negative integer, got {v}"
                        )));
                    }
                    cfg.filter.w = v as usize;
                }
                SweepParam::Lambda => cfg.filter.lambda = v,
                SweepParam::Length => {
                    if v < 2.0 || v.fract() != 0.0 {
                        return Err(Error::InvalidParameter(format!(
                            "length must be an integer >= 2, got {v}"
                        )));
                    }
                    cfg.data.resample = Some(v as usize);
                }
                SweepParam::Tau => unreachable!(),
            }
            cfg.validate()?;
            let prep = prepare_dataset(ds, &cfg.data, cfg.seed)?;
            let mut r = crate::eval::runner::run_prepared(&cfg, &prep)?;
            for c in &mut r.cells {
                c.param = Some(v);
            }
            report.extend(r);
        }
    }
    Ok(report)
}
