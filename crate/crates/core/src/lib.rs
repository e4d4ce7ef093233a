//! Similarity search over uncertain time series.
//!
//! Techniques: Euclidean on observations, MUNICH (sample-based, counting
//! materializations), PROUD (normal approximation of the squared distance),
//! DUST (per-point likelihood distance) and the UMA/UEMA moving-average
//! filters. The [`eval`] module runs seeded retrieval experiments over UCR
//! datasets and reports precision, recall and F1.

pub mod cli;
pub mod distance;
pub mod error;
pub mod eval;
pub mod io;
pub mod model;
pub mod perturbation;
pub mod query;
pub mod seed;
pub mod special;

pub use error::{Error, Result};
pub use model::{
    resample, z_normalize, Dataset, ErrorKind, ErrorModel, MultiObservationSeries, ProbabilisticSeries, TimeSeries,
};
pub use perturbation::{draw_error, perturb, perturb_multi, PerturbationSpec, StdSchedule};
pub use query::{Collection, QuerySpec, Technique};
