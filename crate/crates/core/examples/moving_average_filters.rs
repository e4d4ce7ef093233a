//! UMA and UEMA: smooth observations with weights that shrink for noisy
//! timestamps, then compare with Euclidean.

use uncertts::distance::{ema_filter, euclidean, ma_filter, FilterParams};
use uncertts::{ErrorModel, ProbabilisticSeries};

fn main() -> anyhow::Result<()> {
    let obs = vec![0.0, 0.2, 1.4, 0.3, 0.4, 0.5, -0.9, 0.7];
    let low = ErrorModel::normal(0.2)?;
    let high = ErrorModel::normal(1.0)?;
    let errors = vec![low, low, high, low, low, low, high, low];
    let x = ProbabilisticSeries::new(obs.clone(), errors)?;

    println!("observations {obs:+.2?}");
    println!("ma  w=1      {:+.2?}", ma_filter(&obs, 1));
    println!("ema w=1      {:+.2?}", ema_filter(&obs, 1, 1.0));

    let mut params = FilterParams {
        w: 1,
        ..FilterParams::default()
    };
    println!("uma  w=1     {:+.2?}", params.uma(&x));
    println!("uema w=1     {:+.2?}", params.uema(&x));
    params.normalized = true;
    println!("uma  normalized {:+.2?}", params.uma(&x));

    // filter both sides, then measure with Euclidean
    let y = ProbabilisticSeries::with_constant_error(vec![0.1, 0.2, 0.3, 0.3, 0.5, 0.5, 0.6, 0.6], low)?;
    for w in [0, 1, 2, 3] {
        let p = FilterParams {
            w,
            ..FilterParams::default()
        };
        println!(
            "w={w}: raw {:.3}, uma {:.3}, uema {:.3}",
            euclidean(x.observations(), y.observations()),
            euclidean(&p.uma(&x), &p.uma(&y)),
            euclidean(&p.uema(&x), &p.uema(&y))
        );
    }
    Ok(())
}
