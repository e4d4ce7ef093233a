//! Sweeping the filter window w for UMA and UEMA.

use std::path::Path;

use uncertts::eval::{parameter_sweep, ExperimentConfig, SweepParam};
use uncertts::io::load_ucr_named;

fn main() -> anyhow::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/ucr/GunPoint");
    let ds = load_ucr_named(
        "GunPoint",
        &dir.join("GunPoint_TRAIN.txt"),
        &dir.join("GunPoint_TEST.txt"),
    )?;
    let mut config = ExperimentConfig {
        sigmas: vec![1.0],
        ..ExperimentConfig::default()
    };
    config.data.queries = Some(30);

    let report = parameter_sweep(&config, &[ds], SweepParam::W, &[0.0, 1.0, 2.0, 5.0, 10.0])?;
    for cell in &report.cells {
        println!(
            "{:<5} w={:<3} f1 {:.3}",
            cell.technique,
            cell.param.unwrap_or(f64::NAN),
            cell.f1
        );
    }
    Ok(())
}
