//! UCR archive text files: one series per row, class label first.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{Dataset, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delimiter {
    Comma,
    Whitespace,
}

impl Delimiter {
    /// Comma if the first non-blank line contains one, whitespace otherwise.
    pub fn detect(text: &str) -> Delimiter {
        match text.lines().find(|l| !l.trim().is_empty()) {
            Some(l) if l.contains(',') => Delimiter::Comma,
            _ => Delimiter::Whitespace,
        }
    }

    fn split<'a>(self, line: &'a str) -> Box<dyn Iterator<Item = &'a str> + 'a> {
        match self {
            Delimiter::Comma => Box::new(line.split(',').map(str::trim)),
            Delimiter::Whitespace => Box::new(line.split_whitespace()),
        }
    }
}

/// Parsed rows of one file.
#[derive(Debug, Clone, PartialEq)]
pub struct UcrFile {
    pub labels: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
}

/// Parse UCR text. Rows are numbered from 1 in errors; blank lines are
/// skipped but still counted.
pub fn parse_ucr(path: &Path, text: &str) -> Result<UcrFile> {
    let delim = Delimiter::detect(text);
    let mut out = UcrFile {
        labels: Vec::new(),
        rows: Vec::new(),
    };
    let mut expected: Option<usize> = None;
    for (i, line) in text.lines().enumerate() {
        let row = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            row,
            message,
        };
        let mut cells = Vec::new();
        for (col, cell) in delim.split(line).enumerate() {
            let v: f64 = cell
                .parse()
                .map_err(|_| err(format!("column {}: cannot parse `{cell}` as a number", col + 1)))?;
            if !v.is_finite() {
                return Err(err(format!("column {}: non-finite value `{cell}`", col + 1)));
            }
            cells.push(v);
        }
        if cells.len() < 2 {
            return Err(err("need a label and at least one value".into()));
        }
        let n = cells.len() - 1;
        match expected {
            None => expected = Some(n),
            Some(e) if e != n => {
                return Err(err(format!("row has {n} values, expected {e}")));
            }
            _ => {}
        }
        out.labels.push(cells[0]);
        cells.remove(0);
        out.rows.push(cells);
    }
    Ok(out)
}

pub fn read_ucr(path: &Path) -> Result<UcrFile> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_ucr(path, &text)
}

/// Dataset name from a path like `.../GunPoint_TRAIN.txt`.
pub fn dataset_name(path: &Path) -> String {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("dataset");
    for suffix in ["_TRAIN", "_TEST"] {
        if let Some(base) = stem.strip_suffix(suffix) {
            return base.to_string();
        }
    }
    stem.to_string()
}

/// Concatenate the train and test files into one dataset, labels kept.
pub fn load_ucr(train: &Path, test: &Path) -> Result<Dataset> {
    load_ucr_named(&dataset_name(train), train, test)
}

pub fn load_ucr_named(name: &str, train: &Path, test: &Path) -> Result<Dataset> {
    let a = read_ucr(train)?;
    let b = read_ucr(test)?;
    if let (Some(x), Some(y)) = (a.rows.first(), b.rows.first()) {
        if x.len() != y.len() {
            return Err(Error::Parse {
                path: test.to_path_buf(),
                row: 1,
                message: format!(
                    "series length {} differs from {} in {}",
                    y.len(),
                    x.len(),
                    train.display()
                ),
            });
        }
    }
    let labels = a.labels.into_iter().chain(b.labels).collect();
    let series = a
        .rows
        .into_iter()
        .chain(b.rows)
        .map(TimeSeries::new)
        .collect::<Result<Vec<_>>>()?;
    if series.is_empty() {
        return Err(Error::Parse {
            path: train.to_path_buf(),
            row: 0,
            message: "no series found".into(),
        });
    }
    Dataset::new(name, series, Some(labels))
}

/// Write series in comma-delimited UCR form.
pub fn write_ucr(path: &Path, labels: &[f64], rows: &[Vec<f64>]) -> Result<()> {
    let mut s = String::new();
    for (label, row) in labels.iter().zip(rows) {
        s.push_str(&label.to_string());
        for v in row {
            s.push(',');
            s.push_str(&format!("{v:.9}"));
        }
        s.push('\n');
    }
    fs::write(path, s).map_err(|e| Error::io(path, e))
}
