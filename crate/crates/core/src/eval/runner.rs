//! Seeded leave-one-out retrieval experiments.
//!
//! For every dataset the series are subsampled, truncated or resampled and
//! z-normalized. Each σ (or the mixed schedule) perturbs every series with
//! a seed derived from (seed, dataset, σ, series), so cells do not depend on
//! which other cells run or on the thread count. Each query gets its exact
//! 10-NN as ground truth and per-technique thresholds from its 10th
//! nearest neighbor on observations.

use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::distance::{dust, euclidean, DustTables, FilterParams, MunichParams, ProudParams};
use crate::error::{Error, Result};
use crate::eval::config::{DataOptions, ExperimentConfig, Selection};
use crate::eval::report::{EvalReport, QueryRecord, ReportCell};
use crate::eval::tau::{evaluate_at, extended_tau_grid, tau_sweep, Retrieval, ScoredQuery};
use crate::io::load_ucr_named;
use crate::model::{resample, Dataset, MultiObservationSeries, ProbabilisticSeries, TimeSeries};
use crate::perturbation::{perturb, perturb_multi, PerturbationSpec};
use crate::query::{ground_truth, proud_scores, range_query, tenth_neighbor, Collection, Technique, NEIGHBORS};
use crate::seed::{derive, hash_name};

const TAG_SELECT: u64 = 1;
const TAG_QUERIES: u64 = 2;
const TAG_SERIES: u64 = 3;
const TAG_SAMPLES: u64 = 4;

/// Exact, preprocessed series plus the chosen query indices.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedDataset {
    pub name: String,
    pub series: Vec<TimeSeries>,
    pub queries: Vec<usize>,
}

/// Subsample, truncate, resample and z-normalize, then choose queries.
pub fn prepare_dataset(ds: &Dataset, opts: &DataOptions, seed: u64) -> Result<PreparedDataset> {
    let name_hash = hash_name(ds.name());
    let n = ds.len();
    let keep: Vec<usize> = match opts.max_series {
        Some(m) if m < n => match opts.selection {
            Selection::First => (0..m).collect(),
            Selection::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(derive(seed, &[name_hash, TAG_SELECT]));
                let mut v = sample(&mut rng, n, m).into_vec();
                v.sort_unstable();
                v
            }
        },
        _ => (0..n).collect(),
    };
    let mut series = Vec::with_capacity(keep.len());
    for &i in &keep {
        let mut s = ds.series()[i].clone();
        if let Some(t) = opts.truncate {
            s = s.truncated(t)?;
        }
        if let Some(r) = opts.resample {
            s = resample(&s, r)?;
        }
        series.push(crate::model::z_normalize(&s)?);
    }
    if series.len() <= NEIGHBORS {
        return Err(Error::NotEnoughCandidates {
            available: series.len().saturating_sub(1),
            needed: NEIGHBORS,
        });
    }
    let queries = match opts.queries {
        Some(q) if q < series.len() => {
            let mut rng = ChaCha8Rng::seed_from_u64(derive(seed, &[name_hash, TAG_QUERIES]));
            let mut v = sample(&mut rng, series.len(), q).into_vec();
            v.sort_unstable();
            v
        }
        _ => (0..series.len()).collect(),
    };
    Ok(PreparedDataset {
        name: ds.name().to_string(),
        series,
        queries,
    })
}

/// Perturbed copies of every series under one spec.
#[derive(Debug, Clone)]
pub struct PerturbedSet {
    pub spec: PerturbationSpec,
    pub pdf: Vec<ProbabilisticSeries>,
    pub samples: Option<Vec<MultiObservationSeries>>,
}

fn series_seed(seed: u64, dataset: &str, spec: &PerturbationSpec, index: usize, tag: u64) -> u64 {
    derive(
        seed,
        &[hash_name(dataset), spec.std.nominal().to_bits(), index as u64, tag],
    )
}

/// Perturb every series; with `samples` set, also draw that many
/// observations per timestamp for MUNICH.
pub fn perturb_dataset(
    prep: &PreparedDataset,
    spec: &PerturbationSpec,
    seed: u64,
    samples: Option<usize>,
) -> Result<PerturbedSet> {
    let pdf = prep
        .series
        .iter()
        .enumerate()
        .map(|(i, s)| perturb(s, &spec.with_seed(series_seed(seed, &prep.name, spec, i, TAG_SERIES))))
        .collect::<Result<Vec<_>>>()?;
    let samples = match samples {
        Some(k) => Some(
            prep.series
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    perturb_multi(
                        s,
                        &spec.with_seed(series_seed(seed, &prep.name, spec, i, TAG_SAMPLES)),
                        k,
                    )
                })
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    Ok(PerturbedSet {
        spec: spec.clone(),
        pdf,
        samples,
    })
}

/// UMA and UEMA versions of every perturbed series, filtered once per set.
#[derive(Debug, Clone, Default)]
pub struct FilteredSet {
    pub uma: Vec<Vec<f64>>,
    pub uema: Vec<Vec<f64>>,
}

impl FilteredSet {
    pub fn build(set: &PerturbedSet, filter: &FilterParams, techniques: &[Technique]) -> Self {
        let run = |t: Technique, f: &dyn Fn(&ProbabilisticSeries) -> Vec<f64>| {
            if techniques.contains(&t) {
                set.pdf.iter().map(f).collect()
            } else {
                Vec::new()
            }
        };
        Self {
            uma: run(Technique::Uma, &|s| filter.uma(s)),
            uema: run(Technique::Uema, &|s| filter.uema(s)),
        }
    }

    fn get(&self, t: Technique) -> &[Vec<f64>] {
        if t == Technique::Uma {
            &self.uma
        } else {
            &self.uema
        }
    }
}

/// What one technique produced for one query.
#[derive(Debug, Clone)]
pub enum Outcome {
    Retrieved { ids: Vec<usize>, millis: f64 },
    Scored { scores: Vec<(usize, f64)>, millis: f64 },
    Skipped { millis: f64 },
}

impl Outcome {
    pub fn millis(&self) -> f64 {
        match self {
            Outcome::Retrieved { millis, .. } | Outcome::Scored { millis, .. } | Outcome::Skipped { millis } => *millis,
        }
    }
}

/// Ground truth and per-technique outcomes for one query.
#[derive(Debug, Clone)]
pub struct QueryOutcome {
    pub query: usize,
    pub truth: Vec<usize>,
    pub outcomes: Vec<(Technique, Outcome)>,
}

/// Settings the query loop needs, resolved from the config for one spec.
#[derive(Debug, Clone)]
pub struct QueryContext<'a> {
    pub techniques: &'a [Technique],
    pub exact: &'a [TimeSeries],
    pub set: &'a PerturbedSet,
    pub filtered: &'a FilteredSet,
    pub tables: &'a DustTables,
    pub munich: MunichParams,
    pub proud: ProudParams,
    pub filter: FilterParams,
    pub time_limit: Duration,
}

fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

// The query is filtered inside the timed region; candidates were filtered
// when the set was built.
fn filtered_scan(fq: &[f64], c: Collection<'_, Vec<f64>>, eps: f64) -> Vec<usize> {
    c.iter()
        .filter(|(_, s)| euclidean(fq, s) <= eps)
        .map(|(i, _)| i)
        .collect()
}

impl QueryContext<'_> {
    /// Run every technique for query `qi` against the other series.
    pub fn evaluate(&self, qi: usize) -> Result<QueryOutcome> {
        let pdf = &self.set.pdf;
        let q = &pdf[qi];
        let c = Collection::without(pdf, qi);
        let truth = ground_truth(self.exact[qi].values(), Collection::without(self.exact, qi))?;
        let nb = tenth_neighbor(q, c)?;
        let eps_eucl = euclidean(q.observations(), pdf[nb].observations());

        let mut outcomes = Vec::with_capacity(self.techniques.len());
        for &t in self.techniques {
            let outcome = match t {
                Technique::Euclid => {
                    let start = Instant::now();
                    let ids = range_query(q, c, eps_eucl, |a, b| Ok(euclidean(a.observations(), b.observations())))?;
                    self.finish(start, |millis| Outcome::Retrieved { ids, millis })
                }
                Technique::Dust => {
                    let eps = dust(q, &pdf[nb], self.tables)?;
                    let start = Instant::now();
                    let ids = range_query(q, c, eps, |a, b| dust(a, b, self.tables))?;
                    self.finish(start, |millis| Outcome::Retrieved { ids, millis })
                }
                Technique::Uma | Technique::Uema => {
                    let f = self.filter;
                    let filter = move |s: &ProbabilisticSeries| if t == Technique::Uma { f.uma(s) } else { f.uema(s) };
                    let stored = self.filtered.get(t);
                    let eps = euclidean(&stored[qi], &stored[nb]);
                    let start = Instant::now();
                    let fq = filter(q);
                    let ids = filtered_scan(&fq, Collection::without(stored, qi), eps);
                    self.finish(start, |millis| Outcome::Retrieved { ids, millis })
                }
                Technique::Proud => {
                    let start = Instant::now();
                    let scores = proud_scores(q, c, eps_eucl, &self.proud)?;
                    self.finish(start, |millis| Outcome::Scored { scores, millis })
                }
                Technique::Munich => self.munich_scan(qi, eps_eucl)?,
            };
            outcomes.push((t, outcome));
        }
        Ok(QueryOutcome {
            query: qi,
            truth,
            outcomes,
        })
    }

    fn finish(&self, start: Instant, done: impl FnOnce(f64) -> Outcome) -> Outcome {
        let e = start.elapsed();
        if e > self.time_limit {
            Outcome::Skipped { millis: millis(e) }
        } else {
            done(millis(e))
        }
    }

    // MUNICH checks the limit after every candidate so that a hopeless
    // query stops early.
    fn munich_scan(&self, qi: usize, eps: f64) -> Result<Outcome> {
        let multi = self.set.samples.as_ref().ok_or_else(|| Error::TechniqueMismatch {
            technique: "munich".into(),
            reason: "no multi-sample series were drawn".into(),
        })?;
        let q = &multi[qi];
        let start = Instant::now();
        let mut scores = Vec::with_capacity(multi.len());
        for (i, s) in Collection::without(multi, qi).iter() {
            scores.push((i, self.munich.probability(q, s, eps)?));
            if start.elapsed() > self.time_limit {
                return Ok(Outcome::Skipped {
                    millis: millis(start.elapsed()),
                });
            }
        }
        Ok(Outcome::Scored {
            scores,
            millis: millis(start.elapsed()),
        })
    }
}

fn run_queries(ctx: &QueryContext<'_>, queries: &[usize], threads: usize) -> Result<Vec<QueryOutcome>> {
    if threads <= 1 {
        return queries.iter().map(|&q| ctx.evaluate(q)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))?;
    pool.install(|| queries.par_iter().map(|&q| ctx.evaluate(q)).collect())
}

/// Aggregate query outcomes into one cell per technique. MUNICH and PROUD
/// are reported at the τ maximizing mean F1 over `tau_grid`.
pub fn aggregate(
    dataset: &str,
    spec: &PerturbationSpec,
    techniques: &[Technique],
    outcomes: &[QueryOutcome],
    tau_grid: &[f64],
) -> Result<Vec<ReportCell>> {
    let label = spec.label();
    let sigma = spec.std.nominal();
    let mut cells = Vec::new();
    for (k, &t) in techniques.iter().enumerate() {
        let mut records = Vec::with_capacity(outcomes.len());
        let mut scored = Vec::new();
        let mut scored_at = Vec::new();
        for o in outcomes {
            let (tt, out) = &o.outcomes[k];
            debug_assert_eq!(*tt, t);
            let mut rec = QueryRecord {
                query: o.query,
                precision: 0.0,
                recall: 0.0,
                f1: 0.0,
                millis: out.millis(),
                skipped: false,
            };
            match out {
                Outcome::Retrieved { ids, .. } => {
                    let r = Retrieval::score(ids, &o.truth)?;
                    (rec.precision, rec.recall, rec.f1) = (r.precision, r.recall, r.f1);
                }
                Outcome::Scored { scores, .. } => {
                    scored_at.push(records.len());
                    scored.push(ScoredQuery {
                        truth: o.truth.clone(),
                        scores: scores.clone(),
                    });
                }
                Outcome::Skipped { .. } => rec.skipped = true,
            }
            records.push(rec);
        }
        let mut param = None;
        let mut curve = Vec::new();
        if t.is_probabilistic() && !scored.is_empty() {
            let sweep = tau_sweep(&scored, t, tau_grid)?;
            let at_best = evaluate_at(&scored, t, sweep.best.tau)?;
            for (pos, r) in scored_at.iter().zip(at_best) {
                let rec = &mut records[*pos];
                (rec.precision, rec.recall, rec.f1) = (r.precision, r.recall, r.f1);
            }
            param = Some(sweep.best.tau);
            curve = sweep.curve;
        }
        let mut cell = ReportCell::from_records(dataset, t, &label, sigma, param, records);
        cell.tau_curve = curve;
        cells.push(cell);
    }
    Ok(cells)
}

impl ExperimentConfig {
    pub fn effective_tau_grid(&self) -> Vec<f64> {
        self.tau_grid.clone().unwrap_or_else(extended_tau_grid)
    }

    /// PROUD settings for a spec: mixed schedules default to the mean of
    /// their two stds.
    pub fn proud_for(&self, spec: &PerturbationSpec) -> ProudParams {
        match self.proud.assumed_std {
            Some(_) => self.proud,
            None if spec.std.is_mixed() => ProudParams {
                assumed_std: Some(spec.std.nominal()),
            },
            None => self.proud,
        }
    }
}

/// All techniques for one dataset under one perturbation spec.
pub fn run_spec(
    config: &ExperimentConfig,
    prep: &PreparedDataset,
    spec: &PerturbationSpec,
    tables: &DustTables,
) -> Result<(Vec<ReportCell>, Vec<QueryOutcome>)> {
    let wants_munich = config.techniques.contains(&Technique::Munich);
    let set = perturb_dataset(prep, spec, config.seed, wants_munich.then_some(config.munich.samples))?;
    if config.techniques.contains(&Technique::Dust) {
        tables.prepare(&set.pdf)?;
    }
    let filtered = FilteredSet::build(&set, &config.filter, &config.techniques);
    let ctx = QueryContext {
        techniques: &config.techniques,
        exact: &prep.series,
        set: &set,
        filtered: &filtered,
        tables,
        munich: config.munich,
        proud: config.proud_for(spec),
        filter: config.filter,
        time_limit: Duration::from_secs_f64(config.time_limit_secs),
    };
    let outcomes = run_queries(&ctx, &prep.queries, config.threads.unwrap_or(1))?;
    let cells = aggregate(
        &prep.name,
        spec,
        &config.techniques,
        &outcomes,
        &config.effective_tau_grid(),
    )?;
    Ok((cells, outcomes))
}

/// Every σ (or the mixed schedule) for one prepared dataset.
pub fn run_prepared(config: &ExperimentConfig, prep: &PreparedDataset) -> Result<EvalReport> {
    config.validate()?;
    let tables = DustTables::new(config.dust)?;
    let mut cells = Vec::new();
    for spec in config.perturbation.specs(&config.sigmas) {
        cells.extend(run_spec(config, prep, &spec, &tables)?.0);
    }
    Ok(EvalReport::new(cells))
}

pub fn run_on_datasets(config: &ExperimentConfig, datasets: &[Dataset]) -> Result<EvalReport> {
    let mut report = EvalReport::default();
    for ds in datasets {
        let prep = prepare_dataset(ds, &config.data, config.seed)?;
        report.extend(run_prepared(config, &prep)?);
    }
    Ok(report)
}

/// Load every configured dataset and run the full grid.
pub fn run_experiment(config: &ExperimentConfig) -> Result<EvalReport> {
    config.validate()?;
    if config.datasets.is_empty() {
        return Err(Error::InvalidParameter("no datasets configured".into()));
    }
    let datasets = config
        .datasets
        .iter()
        .map(|d| load_ucr_named(&d.name, &d.train, &d.test))
        .collect::<Result<Vec<_>>>()?;
    run_on_datasets(config, &datasets)
}
