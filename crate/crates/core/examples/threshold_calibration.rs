//! Per-query thresholds: the 10th nearest neighbor on observations fixes ε
//! for Euclidean and DUST, and the exact 10-NN is the ground truth.

use std::path::Path;

use uncertts::distance::{dust, euclidean, DustConfig, DustTables};
use uncertts::io::load_ucr;
use uncertts::query::{calibrate_thresholds, ground_truth, range_query};
use uncertts::{perturb, z_normalize, Collection, ErrorKind, PerturbationSpec};

fn main() -> anyhow::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/ucr/GunPoint");
    let ds = load_ucr(&dir.join("GunPoint_TRAIN.txt"), &dir.join("GunPoint_TEST.txt"))?;
    let exact = ds.series().iter().map(z_normalize).collect::<Result<Vec<_>, _>>()?;
    let noisy = exact
        .iter()
        .enumerate()
        .map(|(i, s)| perturb(s, &PerturbationSpec::constant(ErrorKind::Normal, 0.6, 100 + i as u64)))
        .collect::<Result<Vec<_>, _>>()?;
    let tables = DustTables::new(DustConfig::default())?;

    for qi in [0, 50, 150] {
        let c = Collection::without(&noisy, qi);
        let th = calibrate_thresholds(&noisy[qi], c, &tables)?;
        let truth = ground_truth(exact[qi].values(), Collection::without(&exact, qi))?;
        let by_eucl = range_query(&noisy[qi], c, th.eps_eucl, |a, b| {
            Ok(euclidean(a.observations(), b.observations()))
        })?;
        let by_dust = range_query(&noisy[qi], c, th.eps_dust, |a, b| dust(a, b, &tables))?;
        let hits = |r: &[usize]| r.iter().filter(|i| truth.contains(i)).count();
        println!(
            "query {qi:>3}: eps_eucl {:.3} eps_dust {:.3} | euclid {}/{} correct, dust {}/{} correct",
            th.eps_eucl,
            th.eps_dust,
            hits(&by_eucl),
            by_eucl.len(),
            hits(&by_dust),
            by_dust.len()
        );
    }
    Ok(())
}
