//! MUNICH: the probability that two sample-based series are within ε,
//! exactly by enumeration and bracketed by the convolution route.

use uncertts::distance::{munich_bounds, munich_probability_dp, munich_probability_exact, MunichParams};
use uncertts::MultiObservationSeries;

fn main() -> anyhow::Result<()> {
    let x = MultiObservationSeries::new(vec![vec![0.1, 0.3, 0.2], vec![1.0, 1.2], vec![0.5, 0.4, 0.6]])?;
    let y = MultiObservationSeries::new(vec![vec![0.0, 0.4], vec![1.1, 0.9, 1.4], vec![0.2, 0.9]])?;

    let b = munich_bounds(&x, &y, 2)?;
    println!("every materialized distance lies in [{:.4}, {:.4}]", b.lower, b.upper);

    for eps in [0.2, 0.4, 0.6, 0.8] {
        let exact = munich_probability_exact(&x, &y, eps, 2, 1_000_000)?;
        let dp = munich_probability_dp(&x, &y, eps, 2, 256)?;
        println!(
            "eps {eps:.1}: exact {exact:.4}, enclosure [{:.4}, {:.4}] width {:.1e}",
            dp.lower,
            dp.upper,
            dp.width()
        );
    }

    // inside a query the prefilter short-circuits clear cases
    let params = MunichParams::default();
    println!("eps {:.2} -> {}", b.upper, params.probability(&x, &y, b.upper)?);
    println!("eps 0.05 -> {:.4}", params.probability(&x, &y, 0.05)?);
    Ok(())
}
