//! Preprocessing: z-normalization, truncation and linear resampling.

use uncertts::{resample, z_normalize, TimeSeries};

fn main() -> anyhow::Result<()> {
    let raw = TimeSeries::new(vec![3.0, 5.0, 4.0, 8.0, 10.0, 9.0, 6.0, 7.0])?;
    let z = z_normalize(&raw)?;
    let mean = z.values().iter().sum::<f64>() / z.len() as f64;
    let var = z.values().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / z.len() as f64;
    println!("z-normalized: {:.3?}", z.values());
    println!("mean {mean:.2e}, variance {var:.6}");

    let head = raw.truncated(4)?;
    println!("first four: {:?}", head.values());

    for len in [4, 15] {
        println!("resampled to {len}: {:.3?}", resample(&raw, len)?.values());
    }

    // a flat series has no scale to normalize by
    match z_normalize(&TimeSeries::new(vec![2.0; 5])?) {
        Ok(s) => println!("flat series -> {:?}", s.values()),
        Err(e) => println!("flat series: {e}"),
    }
    Ok(())
}
