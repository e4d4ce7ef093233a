//! Experiments described in TOML: load `configs/desk.toml`, run it, write
//! the CSV report and read it back.

use std::path::Path;

use uncertts::eval::{run_experiment, ExperimentConfig};
use uncertts::io::{read_report, write_report};

fn main() -> anyhow::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/desk.toml");
    // dataset paths in the file are relative to the file itself
    let config = ExperimentConfig::from_file(&path)?;
    println!("{} datasets, sigmas {:?}", config.datasets.len(), config.sigmas);

    let report = run_experiment(&config)?;
    let dir = tempfile::tempdir()?;
    let out = dir.path().join("report.csv");
    write_report(&report, &out)?;
    print!("{}", std::fs::read_to_string(&out)?);

    let back = read_report(&out)?;
    assert_eq!(back.cells.len(), report.cells.len());
    Ok(())
}
