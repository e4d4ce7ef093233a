//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage errors (bad flags, invalid
//! parameters), 2 when a data file or config file cannot be read or parsed.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use crate::distance::DustTables;
use crate::error::{Error, Result};
use crate::eval::config::ExperimentConfig;
use crate::eval::runner::{perturb_dataset, prepare_dataset, FilteredSet, Outcome, QueryContext};
use crate::eval::{chi_square_uniformity, parameter_sweep, run_on_datasets, EvalReport, SweepParam};
use crate::io::report::render_report;
use crate::io::{load_ucr, load_ucr_named, write_report, write_ucr};
use crate::model::{Dataset, ErrorKind};
use crate::perturbation::{perturb, PerturbationSpec};
use crate::query::{calibrate_thresholds, passes, Collection, Technique};
use crate::seed::derive;

/// Worker count cap read from the environment.
pub const THREADS_ENV: &str = "UNCERTTS_THREADS";

/// Smallest σ the CLI passes to the perturbation; `--sigma 0` means
/// "practically noiseless".
pub const MIN_SIGMA: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "uncertts", version, about = "Similarity search over uncertain time series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the experiment described by a config file and write the CSV report.
    Bench {
        #[command(flatten)]
        common: Common,
    },
    /// Run one query with one technique and print the matches.
    Query {
        #[command(flatten)]
        common: Common,
        /// Position of the query series in the (subsampled) dataset.
        #[arg(long, default_value_t = 0)]
        query: usize,
    },
    /// Print the Euclidean and DUST thresholds of every query.
    Calibrate {
        #[command(flatten)]
        common: Common,
    },
    /// Sweep one parameter and write the CSV report.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// w, lambda, length or tau.
        #[arg(long, value_parser = parse_sweep_param)]
        param: SweepParam,
        /// Comma-separated values; defaults depend on the parameter.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
    },
    /// Chi-square uniformity test over the pooled values of each dataset.
    Chisq {
        #[command(flatten)]
        common: Common,
        /// Significance level.
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// Write a z-normalized, perturbed copy of a dataset in UCR format.
    Perturb {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// TOML experiment config; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; CSV reports go to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// euclid, munich, proud, dust, uma or uema; replaces the technique list.
    #[arg(long, value_parser = parse_technique)]
    technique: Option<Technique>,
    /// A single error std; replaces the σ grid and any mixed schedule.
    #[arg(long)]
    sigma: Option<f64>,
    /// A fixed probability threshold for munich and proud.
    #[arg(long)]
    tau: Option<f64>,
    /// Error distribution: uniform, normal or exponential.
    #[arg(long, value_parser = parse_kind)]
    kind: Option<ErrorKind>,
    /// UCR training file; used instead of the config's datasets.
    #[arg(long, requires = "test")]
    train: Option<PathBuf>,
    #[arg(long, requires = "train")]
    test: Option<PathBuf>,
}

fn parse_technique(s: &str) -> std::result::Result<Technique, String> {
    Technique::parse(s).ok_or_else(|| format!("unknown technique `{s}`"))
}

fn parse_kind(s: &str) -> std::result::Result<ErrorKind, String> {
    ErrorKind::parse(s).ok_or_else(|| format!("unknown error kind `{s}`"))
}

fn parse_sweep_param(s: &str) -> std::result::Result<SweepParam, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn usage(message: impl Into<String>) -> Error {
    Error::InvalidParameter(message.into())
}

impl Common {
    /// The config file (or defaults) with command-line overrides applied.
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_file(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(s) = self.sigma {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(usage(format!("--sigma must be non-negative, got {s}")));
            }
            cfg.sigmas = vec![s.max(MIN_SIGMA)];
            cfg.perturbation.mixed = None;
        }
        if let Some(t) = self.technique {
            cfg.techniques = vec![t];
        }
        if let Some(t) = self.tau {
            cfg.tau_grid = Some(vec![t]);
        }
        if let Some(k) = self.kind {
            cfg.perturbation.kind = k;
        }
        if let Some(o) = &self.out {
            cfg.output = Some(o.clone());
        }
        if let Some(cap) = env_threads()? {
            cfg.threads = Some(cfg.threads.map_or(cap, |t| t.min(cap)));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn datasets(&self, cfg: &ExperimentConfig) -> Result<Vec<Dataset>> {
        if let (Some(train), Some(test)) = (&self.train, &self.test) {
            return Ok(vec![load_ucr(train, test)?]);
        }
        if cfg.datasets.is_empty() {
            return Err(usage(
                "no dataset given: pass --train/--test or a config with [[dataset]] entries",
            ));
        }
        cfg.datasets
            .iter()
            .map(|d| load_ucr_named(&d.name, &d.train, &d.test))
            .collect()
    }
}

fn env_threads() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(None),
    }
}

fn emit(report: &EvalReport, target: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match target {
        Some(p) => write_report(report, p),
        None => out
            .write_all(render_report(report)?.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn say(out: &mut dyn Write, line: String) -> Result<()> {
    writeln!(out, "{line}").map_err(|e| Error::io("<stdout>", e))
}

fn join(ids: &[usize]) -> String {
    ids.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

fn bench(common: &Common, out: &mut dyn Write) -> Result<()> {
    if common.config.is_none() && common.train.is_none() {
        return Err(usage("bench needs --config or --train/--test"));
    }
    let cfg = common.config()?;
    let report = run_on_datasets(&cfg, &common.datasets(&cfg)?)?;
    emit(&report, cfg.output.as_deref(), out)
}

fn query(common: &Common, qi: usize, out: &mut dyn Write) -> Result<()> {
    let mut cfg = common.config()?;
    let technique = common.technique.unwrap_or(Technique::Euclid);
    let tau = match (technique.is_probabilistic(), common.tau) {
        (true, None) => return Err(usage(format!("{technique} needs --tau"))),
        (_, t) => t,
    };
    cfg.data.queries = None;
    let ds = &common.datasets(&cfg)?[0];
    let prep = prepare_dataset(ds, &cfg.data, cfg.seed)?;
    if qi >= prep.series.len() {
        return Err(usage(format!(
            "--query {qi} is out of range (dataset has {} series)",
            prep.series.len()
        )));
    }
    let spec = &cfg.perturbation.specs(&cfg.sigmas)[0];
    let wants_munich = technique == Technique::Munich;
    let set = perturb_dataset(&prep, spec, cfg.seed, wants_munich.then_some(cfg.munich.samples))?;
    let tables = DustTables::new(cfg.dust)?;
    if technique == Technique::Dust {
        tables.prepare(&set.pdf)?;
    }
    let filtered = FilteredSet::build(&set, &cfg.filter, &[technique]);
    let techniques = [technique];
    let ctx = QueryContext {
        techniques: &techniques,
        exact: &prep.series,
        set: &set,
        filtered: &filtered,
        tables: &tables,
        munich: cfg.munich,
        proud: cfg.proud_for(spec),
        filter: cfg.filter,
        time_limit: Duration::from_secs_f64(cfg.time_limit_secs),
    };
    let result = ctx.evaluate(qi)?;
    let matches = match &result.outcomes[0].1 {
        Outcome::Retrieved { ids, .. } => ids.clone(),
        Outcome::Scored { scores, .. } => {
            let tau = tau.expect("checked above");
            let mut ids = Vec::new();
            for &(i, s) in scores {
                if passes(technique, s, tau)? {
                    ids.push(i);
                }
            }
            ids
        }
        Outcome::Skipped { millis } => {
            return Err(usage(format!("query exceeded the time limit after {millis:.0} ms")));
        }
    };
    say(out, format!("matches {}", join(&matches)))?;
    say(out, format!("truth {}", join(&result.truth)))
}

fn calibrate(common: &Common, out: &mut dyn Write) -> Result<()> {
    let cfg = common.config()?;
    say(out, "dataset,sigma,query,neighbor,eps_eucl,eps_dust".into())?;
    for ds in common.datasets(&cfg)? {
        let prep = prepare_dataset(&ds, &cfg.data, cfg.seed)?;
        let tables = DustTables::new(cfg.dust)?;
        for spec in cfg.perturbation.specs(&cfg.sigmas) {
            let set = perturb_dataset(&prep, &spec, cfg.seed, None)?;
            for &qi in &prep.queries {
                let t = calibrate_thresholds(&set.pdf[qi], Collection::without(&set.pdf, qi), &tables)?;
                say(
                    out,
                    format!(
                        "{},{:.6},{qi},{},{:.6},{:.6}",
                        prep.name,
                        spec.std.nominal(),
                        t.neighbor,
                        t.eps_eucl,
                        t.eps_dust
                    ),
                )?;
            }
        }
    }
    Ok(())
}

fn sweep(common: &Common, param: SweepParam, values: &[f64], out: &mut dyn Write) -> Result<()> {
    let cfg = common.config()?;
    let values = if values.is_empty() {
        param.default_values(&cfg)
    } else {
        values.to_vec()
    };
    let report = parameter_sweep(&cfg, &common.datasets(&cfg)?, param, &values)?;
    emit(&report, cfg.output.as_deref(), out)
}

fn chisq(common: &Common, alpha: f64, out: &mut dyn Write) -> Result<()> {
    let cfg = common.config()?;
    say(out, "dataset,values,statistic,dof,critical,uniform".into())?;
    for ds in common.datasets(&cfg)? {
        let r = chi_square_uniformity(&ds, alpha)?;
        let n = ds.len() * ds.series_len();
        say(
            out,
            format!(
                "{},{n},{:.6},{},{:.6},{}",
                ds.name(),
                r.statistic,
                r.dof,
                r.critical,
                !r.reject
            ),
        )?;
    }
    Ok(())
}

fn perturb_cmd(common: &Common, out: &mut dyn Write) -> Result<()> {
    let cfg = common.config()?;
    let target = cfg.output.clone().ok_or_else(|| usage("perturb needs --out"))?;
    let ds = &common.datasets(&cfg)?[0];
    let spec = &cfg.perturbation.specs(&cfg.sigmas)[0];
    let norm = ds.z_normalized()?;
    let rows = norm
        .series()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            Ok(perturb(s, &spec.with_seed(derive(cfg.seed, &[i as u64])))?
                .observations()
                .to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    let labels = match ds.labels() {
        Some(l) => l.to_vec(),
        None => vec![0.0; rows.len()],
    };
    write_ucr(&target, &labels, &rows)?;
    say(
        out,
        format!("wrote {} series ({}) to {}", rows.len(), label(spec), target.display()),
    )
}

fn label(spec: &PerturbationSpec) -> String {
    format!("{}, sigma {}", spec.label(), spec.std.nominal())
}

/// Parse `args` (program name first) and run the chosen subcommand,
/// returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Bench { common } => bench(common, out),
        Command::Query { common, query: q } => query(common, *q, out),
        Command::Calibrate { common } => calibrate(common, out),
        Command::Sweep { common, param, values } => sweep(common, *param, values, out),
        Command::Chisq { common, alpha } => chisq(common, *alpha, out),
        Command::Perturb { common } => perturb_cmd(common, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_data_error() {
                2
            } else {
                1
            }
        }
    }
}
