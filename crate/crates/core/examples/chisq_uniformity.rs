//! Chi-square test of whether z-normalized values are uniformly spread,
//! on a bundled dataset and on synthetic data.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uncertts::eval::{chi_square_uniformity, chi_square_uniformity_values};
use uncertts::io::load_ucr;

fn main() -> anyhow::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/ucr/ItalyPowerDemand");
    let ds = load_ucr(
        &dir.join("ItalyPowerDemand_TRAIN.txt"),
        &dir.join("ItalyPowerDemand_TEST.txt"),
    )?;
    let r = chi_square_uniformity(&ds, 0.05)?;
    println!(
        "{}: statistic {:.1}, dof {}, critical {:.1}, uniform rejected: {}",
        ds.name(),
        r.statistic,
        r.dof,
        r.critical,
        r.reject
    );

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let flat: Vec<f64> = (0..5000).map(|_| rng.random::<f64>()).collect();
    let r = chi_square_uniformity_values(&flat, 0.05)?;
    println!(
        "uniform draws: statistic {:.1}, critical {:.1}, rejected: {}",
        r.statistic, r.critical, r.reject
    );
    Ok(())
}
