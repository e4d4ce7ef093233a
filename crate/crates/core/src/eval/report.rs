//! Aggregated experiment results.

use crate::eval::metrics::mean_and_ci;
use crate::eval::tau::TauPoint;
use crate::query::Technique;

/// Outcome of one query under one technique.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryRecord {
    /// Index of the query within the prepared dataset.
    pub query: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub millis: f64,
    pub skipped: bool,
}

/// One (dataset, technique, σ, parameter) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportCell {
    pub dataset: String,
    pub technique: String,
    pub error_kind: String,
    pub sigma: f64,
    pub param: Option<f64>,
    pub precision: f64,
    pub precision_ci: f64,
    pub recall: f64,
    pub recall_ci: f64,
    pub f1: f64,
    pub f1_ci: f64,
    pub mean_query_ms: f64,
    /// Queries that completed.
    pub queries: usize,
    pub skipped: usize,
    pub records: Vec<QueryRecord>,
    /// Mean metrics per τ (MUNICH and PROUD only).
    pub tau_curve: Vec<TauPoint>,
}

impl ReportCell {
    /// Aggregate per-query records. Metrics average the completed queries;
    /// the timing averages every query, skipped ones included.
    pub fn from_records(
        dataset: &str,
        technique: Technique,
        error_kind: &str,
        sigma: f64,
        param: Option<f64>,
        records: Vec<QueryRecord>,
    ) -> Self {
        let done: Vec<&QueryRecord> = records.iter().filter(|r| !r.skipped).collect();
        let col = |f: fn(&QueryRecord) -> f64| mean_and_ci(&done.iter().map(|r| f(r)).collect::<Vec<_>>());
        let (precision, precision_ci) = col(|r| r.precision);
        let (recall, recall_ci) = col(|r| r.recall);
        let (f1, f1_ci) = col(|r| r.f1);
        let mean_query_ms = if records.is_empty() {
            0.0
        } else {
            records.iter().map(|r| r.millis).sum::<f64>() / records.len() as f64
        };
        Self {
            dataset: dataset.to_string(),
            technique: technique.name().to_string(),
            error_kind: error_kind.to_string(),
            sigma,
            param,
            precision,
            precision_ci,
            recall,
            recall_ci,
            f1,
            f1_ci,
            mean_query_ms,
            queries: done.len(),
            skipped: records.len() - done.len(),
            records,
            tau_curve: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalReport {
    pub cells: Vec<ReportCell>,
}

impl EvalReport {
    pub fn new(mut cells: Vec<ReportCell>) -> Self {
        sort_cells(&mut cells);
        Self { cells }
    }

    pub fn extend(&mut self, other: EvalReport) {
        self.cells.extend(other.cells);
        sort_cells(&mut self.cells);
    }

    /// First cell matching dataset, technique and σ (to 1e-9).
    pub fn cell(&self, dataset: &str, technique: Technique, sigma: f64) -> Option<&ReportCell> {
        self.cells
            .iter()
            .find(|c| c.dataset == dataset && c.technique == technique.name() && (c.sigma - sigma).abs() < 1e-9)
    }

    pub fn cells_for(&self, technique: Technique) -> impl Iterator<Item = &ReportCell> {
        self.cells.iter().filter(move |c| c.technique == technique.name())
    }
}

/// Report row order: dataset, technique, σ, parameter.
pub fn sort_cells(cells: &mut [ReportCell]) {
    cells.sort_by(order);
}

pub fn sort_cell_refs(cells: &mut [&ReportCell]) {
    cells.sort_by(|a, b| order(a, b));
}

fn order(a: &ReportCell, b: &ReportCell) -> std::cmp::Ordering {
    a.dataset
        .cmp(&b.dataset)
        .then_with(|| a.technique.cmp(&b.technique))
        .then_with(|| a.sigma.total_cmp(&b.sigma))
        .then_with(|| {
            a.param
                .unwrap_or(f64::NEG_INFINITY)
                .total_cmp(&b.param.unwrap_or(f64::NEG_INFINITY))
        })
}
