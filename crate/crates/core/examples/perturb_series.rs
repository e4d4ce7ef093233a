//! Turning exact series into uncertain ones: one observation per timestamp
//! for PROUD/DUST/UMA/UEMA, several samples per timestamp for MUNICH.

use uncertts::{perturb, perturb_multi, ErrorKind, PerturbationSpec, StdSchedule, TimeSeries};

fn main() -> anyhow::Result<()> {
    let exact = TimeSeries::new((0..12).map(|i| (i as f64 * 0.5).sin()).collect())?;

    for kind in [ErrorKind::Normal, ErrorKind::Uniform, ErrorKind::Exponential] {
        let spec = PerturbationSpec::constant(kind, 0.4, 7);
        let noisy = perturb(&exact, &spec)?;
        let residual: Vec<f64> = noisy
            .observations()
            .iter()
            .zip(exact.values())
            .map(|(o, e)| o - e)
            .collect();
        println!("{:<12} residuals {:+.2?}", kind.name(), residual);
    }

    // 20% of timestamps get σ = 1.0, the rest σ = 0.4
    let mixed = PerturbationSpec {
        kind: ErrorKind::Normal,
        mix_kinds: None,
        std: StdSchedule::Mixed {
            fraction_high: 0.2,
            std_high: 1.0,
            std_low: 0.4,
        },
        seed: 7,
    };
    let noisy = perturb(&exact, &mixed)?;
    println!("{} stds {:?}", mixed.label(), noisy.stds().collect::<Vec<_>>());

    // same seed, same draws
    assert_eq!(perturb(&exact, &mixed)?, noisy);

    let samples = perturb_multi(&exact, &PerturbationSpec::constant(ErrorKind::Normal, 0.2, 7), 5)?;
    println!("timestamp 0 samples: {:.3?}", samples.at(0));
    println!("{:.3e} materializations", samples.materializations());
    Ok(())
}
