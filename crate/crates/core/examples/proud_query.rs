//! PROUD: normal approximation of the squared distance and a probabilistic
//! range query at several τ.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uncertts::distance::{proud_accepts, proud_distance_moments};
use uncertts::query::{probabilistic_range_query, Uncertain};
use uncertts::{Collection, ErrorModel, ProbabilisticSeries, QuerySpec, Technique};

fn main() -> anyhow::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let err = ErrorModel::normal(0.3)?;
    let base: Vec<f64> = (0..40).map(|i| (i as f64 / 6.0).sin()).collect();
    let series: Vec<ProbabilisticSeries> = (0..30)
        .map(|k| {
            let drift = k as f64 * 0.02;
            let obs = base.iter().map(|v| v + drift + rng.random_range(-0.3..0.3)).collect();
            ProbabilisticSeries::with_constant_error(obs, err)
        })
        .collect::<uncertts::Result<_>>()?;

    let q = &series[0];
    let m = proud_distance_moments(q, &series[5])?;
    println!("squared distance to #5: mean {:.3}, variance {:.3}", m.mean, m.variance);
    let d = proud_accepts(q, &series[5], 3.4, 0.5)?;
    println!(
        "eps 3.4, tau 0.5: score {:.3} vs limit {:.3} -> {}",
        d.score, d.limit, d.accepted
    );

    let c = Collection::without(&series, 0);
    for tau in [0.1, 0.5, 0.9] {
        let spec = QuerySpec::new(Technique::Proud, 3.4, Some(tau))?;
        let hits = probabilistic_range_query(Uncertain::Pdf(q, c), &spec)?;
        println!("tau {tau}: {} matches {:?}", hits.len(), hits);
    }
    Ok(())
}
