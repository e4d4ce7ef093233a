//! Turning exact ground truth into uncertain series by adding seeded,
//! zero-mean errors.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::model::{ErrorKind, ErrorModel, MultiObservationSeries, ProbabilisticSeries, TimeSeries};

/// How error standard deviations are assigned to timestamps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StdSchedule {
    Constant(f64),
    /// `round(fraction_high * n)` timestamps, picked by a seeded shuffle, get
    /// `std_high`; the rest get `std_low`.
    Mixed {
        fraction_high: f64,
        std_high: f64,
        std_low: f64,
    },
}

impl StdSchedule {
    pub fn validate(&self) -> Result<()> {
        let positive = |s: f64| s.is_finite() && s > 0.0;
        match *self {
            StdSchedule::Constant(s) if !positive(s) => Err(Error::InvalidStd(s)),
            StdSchedule::Mixed {
                fraction_high,
                std_high,
                std_low,
            } => {
                if !(0.0..=1.0).contains(&fraction_high) {
                    return Err(Error::InvalidParameter(format!(
                        "fraction_high must lie in [0, 1], got {fraction_high}"
                    )));
                }
                for s in [std_high, std_low] {
                    if !positive(s) {
                        return Err(Error::InvalidStd(s));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Single representative σ: the constant itself, or the mean of the two
    /// stds of a mixed schedule.
    pub fn nominal(&self) -> f64 {
        match *self {
            StdSchedule::Constant(s) => s,
            StdSchedule::Mixed { std_high, std_low, .. } => 0.5 * (std_high + std_low),
        }
    }

    pub fn is_mixed(&self) -> bool {
        matches!(self, StdSchedule::Mixed { .. })
    }
}

/// Everything needed to perturb one series deterministically.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationSpec {
    pub kind: ErrorKind,
    /// When set, each timestamp draws its kind uniformly from this list.
    pub mix_kinds: Option<Vec<ErrorKind>>,
    pub std: StdSchedule,
    pub seed: u64,
}

impl PerturbationSpec {
    pub fn constant(kind: ErrorKind, std: f64, seed: u64) -> Self {
        Self {
            kind,
            mix_kinds: None,
            std: StdSchedule::Constant(std),
            seed,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        self.std.validate()?;
        if let Some(kinds) = &self.mix_kinds {
            if kinds.is_empty() {
                return Err(Error::InvalidParameter("mix_kinds must not be empty".into()));
            }
        }
        Ok(())
    }

    /// Short label such as `normal`, `normal/mixed-std` or
    /// `uniform+normal+exponential/mixed-std`.
    pub fn label(&self) -> String {
        let kinds = match &self.mix_kinds {
            Some(k) => k.iter().map(|k| k.name()).collect::<Vec<_>>().join("+"),
            None => self.kind.name().to_string(),
        };
        if self.std.is_mixed() {
            format!("{kinds}/mixed-std")
        } else {
            kinds
        }
    }

    // Per-timestamp error models. Consumes randomness in a fixed order:
    // shuffle for the mixed schedule first, then the kind choices.
    fn models(&self, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<ErrorModel>> {
        self.validate()?;
        let stds: Vec<f64> = match self.std {
            StdSchedule::Constant(s) => vec![s; n],
            StdSchedule::Mixed {
                fraction_high,
                std_high,
                std_low,
            } => {
                let high = (fraction_high * n as f64).round() as usize;
                let mut order: Vec<usize> = (0..n).collect();
                order.shuffle(rng);
                let mut stds = vec![std_low; n];
                for &i in &order[..high.min(n)] {
                    stds[i] = std_high;
                }
                stds
            }
        };
        let kinds: Vec<ErrorKind> = match &self.mix_kinds {
            None => vec![self.kind; n],
            Some(list) => (0..n)
                .map(|_| *list.choose(rng).expect("validated non-empty"))
                .collect(),
        };
        kinds
            .into_iter()
            .zip(stds)
            .map(|(k, s)| ErrorModel::new(k, s))
            .collect()
    }
}

/// One zero-mean draw from `model`.
pub fn draw_error<R: Rng + ?Sized>(model: &ErrorModel, rng: &mut R) -> f64 {
    let s = model.std();
    match model.kind() {
        ErrorKind::Uniform => {
            let half = s * 3f64.sqrt();
            (2.0 * rng.random::<f64>() - 1.0) * half
        }
        ErrorKind::Normal => {
            let z: f64 = StandardNormal.sample(rng);
            s * z
        }
        ErrorKind::Exponential => {
            let e: f64 = Exp1.sample(rng);
            s * e - s
        }
    }
}

/// Add one error draw per timestamp. The returned series records the error
/// model used at every timestamp.
pub fn perturb(ts: &TimeSeries, spec: &PerturbationSpec) -> Result<ProbabilisticSeries> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let models = spec.models(ts.len(), &mut rng)?;
    let obs = ts
        .values()
        .iter()
        .zip(&models)
        .map(|(v, m)| v + draw_error(m, &mut rng))
        .collect();
    ProbabilisticSeries::new(obs, models)
}

/// Draw `samples` independent observations per timestamp. With one sample
/// this reproduces [`perturb`] under the same spec.
pub fn perturb_multi(ts: &TimeSeries, spec: &PerturbationSpec, samples: usize) -> Result<MultiObservationSeries> {
    if samples == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let models = spec.models(ts.len(), &mut rng)?;
    let out = ts
        .values()
        .iter()
        .zip(&models)
        .map(|(v, m)| (0..samples).map(|_| v + draw_error(m, &mut rng)).collect())
        .collect();
    MultiObservationSeries::new(out)
}
