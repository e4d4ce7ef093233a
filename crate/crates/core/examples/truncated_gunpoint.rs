//! A small end-to-end run: the first 60 GunPoint series cut to 6 points so
//! MUNICH can enumerate every materialization.

use std::path::Path;

use uncertts::eval::{run_experiment, DatasetSource, ExperimentConfig};
use uncertts::Technique;

fn main() -> anyhow::Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/ucr");
    let mut config = ExperimentConfig {
        sigmas: vec![0.2],
        datasets: vec![DatasetSource::in_archive(&root, "GunPoint")],
        ..ExperimentConfig::default()
    };
    config.data.max_series = Some(60);
    config.data.truncate = Some(6);
    config.data.queries = Some(5);

    let report = run_experiment(&config)?;
    println!("{:<8} {:>6} {:>6} {:>6} {:>10}", "", "prec", "recall", "f1", "ms/query");
    for t in Technique::ALL {
        if let Some(c) = report.cell("GunPoint", t, 0.2) {
            println!(
                "{:<8} {:>6.3} {:>6.3} {:>6.3} {:>10.4}",
                t.name(),
                c.precision,
                c.recall,
                c.f1,
                c.mean_query_ms
            );
        }
    }
    Ok(())
}
