//! Retrieval experiments: metrics, τ selection, chi-square diagnostics,
//! the experiment runner and parameter sweeps.

pub mod chisq;
pub mod config;
pub mod metrics;
pub mod report;
pub mod runner;
pub mod sweep;
pub mod tau;

pub use chisq::{chi_square_critical, chi_square_uniformity, chi_square_uniformity_values, ChiSquare};
pub use config::{DataOptions, DatasetSource, ExperimentConfig, MixedStd, PerturbationConfig, Selection};
pub use metrics::{confidence_interval_95, f1, precision_recall};
pub use report::{EvalReport, QueryRecord, ReportCell};
pub use runner::{
    perturb_dataset, prepare_dataset, run_experiment, run_on_datasets, run_prepared, FilteredSet, PerturbedSet,
    PreparedDataset,
};
pub use sweep::{parameter_sweep, SweepParam};
pub use tau::{default_tau_grid, extended_tau_grid, tau_sweep, ScoredQuery, TauPoint, TauSweep};
