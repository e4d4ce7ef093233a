//! DUST: per-point likelihood distance built from the error models, compared
//! with Euclidean on the same observations.

use uncertts::distance::{dust, dust_point, euclidean, DustConfig, DustTable, DustTables};
use uncertts::{ErrorModel, ProbabilisticSeries};

fn main() -> anyhow::Result<()> {
    let config = DustConfig::default();
    let normal = ErrorModel::normal(0.5)?;
    let uniform = ErrorModel::uniform(0.5)?;

    // under normal error dust(x, y) grows like |x - y| / (2σ)
    let table = DustTable::with_config(normal, normal, &config)?;
    for delta in [0.0, 0.25, 0.5, 1.0, 2.0] {
        println!(
            "normal  delta {delta:.2}: dust {:.4}  |d|/2s {:.4}",
            dust_point(0.0, delta, &table),
            delta / (2.0 * 0.5)
        );
    }
    let table = DustTable::with_config(uniform, uniform, &config)?;
    for delta in [0.0, 0.5, 1.0, 1.5] {
        println!("uniform delta {delta:.2}: dust {:.4}", dust_point(0.0, delta, &table));
    }

    // mixed per-timestamp errors: noisy timestamps count for less
    let x = ProbabilisticSeries::new(
        vec![0.0, 1.0, 0.5, -0.3],
        vec![normal, ErrorModel::normal(1.5)?, normal, normal],
    )?;
    let y = ProbabilisticSeries::with_constant_error(vec![0.1, -1.0, 0.4, -0.2], normal)?;
    let tables = DustTables::new(config)?;
    tables.prepare([&x, &y])?;
    println!("euclidean {:.4}", euclidean(x.observations(), y.observations()));
    println!("dust      {:.4}", dust(&x, &y, &tables)?);
    println!("symmetric: {}", dust(&x, &y, &tables)? == dust(&y, &x, &tables)?);
    println!("{} tables cached", tables.len());
    Ok(())
}
