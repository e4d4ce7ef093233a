//! F1 of every fast technique as the error std grows.

use std::path::Path;

use uncertts::eval::{run_experiment, DatasetSource, ExperimentConfig};
use uncertts::Technique;

fn main() -> anyhow::Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/ucr");
    let techniques = vec![
        Technique::Euclid,
        Technique::Proud,
        Technique::Dust,
        Technique::Uma,
        Technique::Uema,
    ];
    let mut config = ExperimentConfig {
        sigmas: vec![0.2, 0.6, 1.0, 1.4, 2.0],
        techniques: techniques.clone(),
        datasets: vec![DatasetSource::in_archive(&root, "ItalyPowerDemand")],
        ..ExperimentConfig::default()
    };
    config.data.max_series = Some(200);
    config.data.queries = Some(40);

    let report = run_experiment(&config)?;
    print!("{:<6}", "sigma");
    for t in &techniques {
        print!("{:>8}", t.name());
    }
    println!();
    for &s in &config.sigmas {
        print!("{s:<6.1}");
        for &t in &techniques {
            let f1 = report.cell("ItalyPowerDemand", t, s).map_or(f64::NAN, |c| c.f1);
            print!("{f1:>8.3}");
        }
        println!();
    }
    Ok(())
}
