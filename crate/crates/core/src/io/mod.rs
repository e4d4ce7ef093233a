//! Dataset files and CSV reports.

pub mod report;
pub mod ucr;

pub use report::{read_report, write_report, REPORT_HEADER};
pub use ucr::{load_ucr, load_ucr_named, parse_ucr, read_ucr, write_ucr, Delimiter, UcrFile};
