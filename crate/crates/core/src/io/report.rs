//! CSV report files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::eval::report::{sort_cell_refs, EvalReport, ReportCell};

pub const REPORT_HEADER: &str = "dataset,technique,error_kind,sigma,param,precision,precision_ci,recall,recall_ci,f1,f1_ci,mean_query_ms,queries,skipped";

fn check_field(s: &str) -> Result<()> {
    if s.contains([',', '\n', '\r', '"']) {
        return Err(Error::InvalidParameter(format!(
            "report field `{s}` contains a CSV delimiter"
        )));
    }
    Ok(())
}

/// Render the report: header plus one sorted row per cell, reals with six
/// decimals, empty `param` when unset.
pub fn render_report(report: &EvalReport) -> Result<String> {
    let mut cells: Vec<&ReportCell> = report.cells.iter().collect();
    sort_cell_refs(&mut cells);
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for c in cells {
        for f in [&c.dataset, &c.technique, &c.error_kind] {
            check_field(f)?;
        }
        let param = c.param.map(|p| format!("{p:.6}")).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{:.6},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{},{}",
            c.dataset,
            c.technique,
            c.error_kind,
            c.sigma,
            param,
            c.precision,
            c.precision_ci,
            c.recall,
            c.recall_ci,
            c.f1,
            c.f1_ci,
            c.mean_query_ms,
            c.queries,
            c.skipped
        )
        .expect("writing to a String");
    }
    Ok(out)
}

pub fn write_report(report: &EvalReport, path: &Path) -> Result<()> {
    let text = render_report(report)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Parse report text back into cells (per-query records are not stored).
pub fn parse_report(path: &Path, text: &str) -> Result<EvalReport> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == REPORT_HEADER => {}
        _ => {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                row: 1,
                message: "missing or unexpected header".into(),
            })
        }
    }
    let mut cells = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            row: i + 1,
            message,
        };
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 14 {
            return Err(err(format!("expected 14 fields, found {}", f.len())));
        }
        let real = |k: usize| -> Result<f64> {
            f[k].parse()
                .map_err(|_| err(format!("column {}: bad number `{}`", k + 1, f[k])))
        };
        let count = |k: usize| -> Result<usize> {
            f[k].parse()
                .map_err(|_| err(format!("column {}: bad count `{}`", k + 1, f[k])))
        };
        cells.push(ReportCell {
            dataset: f[0].to_string(),
            technique: f[1].to_string(),
            error_kind: f[2].to_string(),
            sigma: real(3)?,
            param: if f[4].is_empty() { None } else { Some(real(4)?) },
            precision: real(5)?,
            precision_ci: real(6)?,
            recall: real(7)?,
            recall_ci: real(8)?,
            f1: real(9)?,
            f1_ci: real(10)?,
            mean_query_ms: real(11)?,
            queries: count(12)?,
            skipped: count(13)?,
            records: Vec::new(),
            tau_curve: Vec::new(),
        });
    }
    Ok(EvalReport::new(cells))
}

pub fn read_report(path: &Path) -> Result<EvalReport> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_report(path, &text)
}
