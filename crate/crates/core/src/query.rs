//! Range queries, probabilistic range queries, k-NN and threshold
//! calibration over linear scans of a collection.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::distance::{dust, euclidean, DustTables, FilterParams, MunichParams, ProudParams};
use crate::error::{Error, Result};
use crate::model::{MultiObservationSeries, ProbabilisticSeries};
use crate::special::inverse_normal_cdf;

/// Size of the ground-truth neighbor set and rank of the calibration
/// neighbor.
pub const NEIGHBORS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Technique {
    Euclid,
    Munich,
    Proud,
    Dust,
    Uma,
    Uema,
}

impl Technique {
    pub const ALL: [Technique; 6] = [
        Technique::Euclid,
        Technique::Munich,
        Technique::Proud,
        Technique::Dust,
        Technique::Uma,
        Technique::Uema,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Technique::Euclid => "euclid",
            Technique::Munich => "munich",
            Technique::Proud => "proud",
            Technique::Dust => "dust",
            Technique::Uma => "uma",
            Technique::Uema => "uema",
        }
    }

    pub fn parse(s: &str) -> Option<Technique> {
        let s = s.to_ascii_lowercase();
        Technique::ALL.into_iter().find(|t| t.name() == s).or(match s.as_str() {
            "euclidean" => Some(Technique::Euclid),
            _ => None,
        })
    }

    /// MUNICH and PROUD answer with a probability threshold τ.
    pub fn is_probabilistic(self) -> bool {
        matches!(self, Technique::Munich | Technique::Proud)
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A member sequence of the collection, optionally hiding one index (the
/// query itself in leave-one-out runs). Indices reported by every query
/// refer to the underlying slice.
#[derive(Debug)]
pub struct Collection<'a, T> {
    items: &'a [T],
    excluded: Option<usize>,
}

impl<T> Clone for Collection<'_, T> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<T> Copy for Collection<'_, T> {}

impl<'a, T> Collection<'a, T> {
    pub fn new(items: &'a [T]) -> Self {
        Self { items, excluded: None }
    }

    pub fn without(items: &'a [T], index: usize) -> Self {
        Self {
            items,
            excluded: Some(index),
        }
    }

    pub fn len(&self) -> usize {
        match self.excluded {
            Some(i) if i < self.items.len() => self.items.len() - 1,
            _ => self.items.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, index: usize) -> &'a T {
        &self.items[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &'a T)> + 'a {
        let excluded = self.excluded;
        self.items.iter().enumerate().filter(move |(i, _)| Some(*i) != excluded)
    }
}

/// What to run and with which thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct QuerySpec {
    pub technique: Technique,
    pub eps: f64,
    pub tau: Option<f64>,
    pub munich: MunichParams,
    pub proud: ProudParams,
    pub filter: FilterParams,
}

impl QuerySpec {
    pub fn new(technique: Technique, eps: f64, tau: Option<f64>) -> Result<Self> {
        let spec = Self {
            technique,
            eps,
            tau,
            munich: MunichParams::default(),
            proud: ProudParams::default(),
            filter: FilterParams::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps.is_finite() && self.eps >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "eps must be non-negative, got {}",
                self.eps
            )));
        }
        match (self.technique.is_probabilistic(), self.tau) {
            (true, None) => Err(Error::TechniqueMismatch {
                technique: self.technique.to_string(),
                reason: "a probability threshold tau is required".into(),
            }),
            (false, Some(_)) => Err(Error::TechniqueMismatch {
                technique: self.technique.to_string(),
                reason: "tau only applies to munich and proud".into(),
            }),
            (true, Some(t)) if !(t > 0.0 && t < 1.0) => Err(Error::InvalidTau(t)),
            _ => self.filter.validate(),
        }
    }
}

/// Members with `dist(q, s) ≤ eps`, in index order.
pub fn range_query<Q: ?Sized, T>(
    q: &Q,
    c: Collection<'_, T>,
    eps: f64,
    mut dist: impl FnMut(&Q, &T) -> Result<f64>,
) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for (i, s) in c.iter() {
        if dist(q, s)? <= eps {
            out.push(i);
        }
    }
    Ok(out)
}

/// Distance of every member to `q`, in index order.
pub fn distances<Q: ?Sized, T>(
    q: &Q,
    c: Collection<'_, T>,
    mut dist: impl FnMut(&Q, &T) -> Result<f64>,
) -> Result<Vec<(usize, f64)>> {
    c.iter().map(|(i, s)| Ok((i, dist(q, s)?))).collect()
}

/// The `k` members nearest to `q`, ascending by distance, ties by index.
pub fn knn<Q: ?Sized, T>(
    q: &Q,
    c: Collection<'_, T>,
    k: usize,
    dist: impl FnMut(&Q, &T) -> Result<f64>,
) -> Result<Vec<usize>> {
    if k > c.len() {
        return Err(Error::NotEnoughCandidates {
            available: c.len(),
            needed: k,
        });
    }
    let mut d = distances(q, c, dist)?;
    rank(&mut d);
    Ok(d.into_iter().take(k).map(|(i, _)| i).collect())
}

/// Sort `(index, distance)` pairs ascending, ties by index.
pub fn rank(d: &mut [(usize, f64)]) {
    d.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
}

/// MUNICH probability for every member, in index order.
pub fn munich_probabilities(
    q: &MultiObservationSeries,
    c: Collection<'_, MultiObservationSeries>,
    eps: f64,
    params: &MunichParams,
) -> Result<Vec<(usize, f64)>> {
    distances(q, c, |a, b| params.probability(a, b, eps))
}

/// PROUD normalized threshold `ε_norm` for every member, in index order.
pub fn proud_scores(
    q: &ProbabilisticSeries,
    c: Collection<'_, ProbabilisticSeries>,
    eps: f64,
    params: &ProudParams,
) -> Result<Vec<(usize, f64)>> {
    distances(q, c, |a, b| params.score(a, b, eps))
}

/// Whether a member with the given score passes threshold `tau`: MUNICH
/// scores are probabilities, PROUD scores are `ε_norm` compared against
/// `Φ⁻¹(τ)`.
pub fn passes(technique: Technique, score: f64, tau: f64) -> Result<bool> {
    match technique {
        Technique::Munich => Ok(score >= tau),
        Technique::Proud => Ok(score >= inverse_normal_cdf(tau)?),
        t => Err(Error::TechniqueMismatch {
            technique: t.to_string(),
            reason: "not a probabilistic technique".into(),
        }),
    }
}

/// Query and collection for a probabilistic range query, in the
/// representation the technique consumes.
#[derive(Debug, Clone, Copy)]
pub enum Uncertain<'a> {
    Samples(&'a MultiObservationSeries, Collection<'a, MultiObservationSeries>),
    Pdf(&'a ProbabilisticSeries, Collection<'a, ProbabilisticSeries>),
}

/// Members with `Pr(distance ≤ ε) ≥ τ`.
pub fn probabilistic_range_query(input: Uncertain<'_>, spec: &QuerySpec) -> Result<Vec<usize>> {
    spec.validate()?;
    let tau = spec.tau.expect("validated");
    let scores = match (spec.technique, input) {
        (Technique::Munich, Uncertain::Samples(q, c)) => munich_probabilities(q, c, spec.eps, &spec.munich)?,
        (Technique::Proud, Uncertain::Pdf(q, c)) => proud_scores(q, c, spec.eps, &spec.proud)?,
        (t, _) => {
            return Err(Error::TechniqueMismatch {
                technique: t.to_string(),
                reason: "munich needs sample-based series, proud needs per-timestamp error models".into(),
            })
        }
    };
    let mut out = Vec::new();
    for (i, s) in scores {
        if passes(spec.technique, s, tau)? {
            out.push(i);
        }
    }
    Ok(out)
}

/// Per-query thresholds making every technique answer the same task.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// Collection index of the 10th nearest neighbor on observations.
    pub neighbor: usize,
    pub eps_eucl: f64,
    pub eps_dust: f64,
}

/// The 10th nearest neighbor `c` of `q` under Euclidean on observations,
/// and the Euclidean and DUST distances from `q` to `c`.
pub fn calibrate_thresholds(
    q: &ProbabilisticSeries,
    c: Collection<'_, ProbabilisticSeries>,
    tables: &DustTables,
) -> Result<Thresholds> {
    let neighbor = tenth_neighbor(q, c)?;
    let cs = c.get(neighbor);
    tables.prepare([q, cs])?;
    Ok(Thresholds {
        neighbor,
        eps_eucl: euclidean(q.observations(), cs.observations()),
        eps_dust: dust(q, cs, tables)?,
    })
}

/// Index of the 10th nearest neighbor on observations.
pub fn tenth_neighbor(q: &ProbabilisticSeries, c: Collection<'_, ProbabilisticSeries>) -> Result<usize> {
    let nn = knn(q, c, NEIGHBORS, |a, b| {
        Ok(euclidean(a.observations(), b.observations()))
    })?;
    Ok(nn[NEIGHBORS - 1])
}

/// The 10 nearest neighbors of the exact query among the exact series.
pub fn ground_truth<T: AsRef<[f64]>>(q: &[f64], c: Collection<'_, T>) -> Result<Vec<usize>> {
    let mut nn = knn(q, c, NEIGHBORS, |a, b| Ok(euclidean(a, b.as_ref())))?;
    nn.sort_unstable();
    Ok(nn)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::{munich_probability_exact, DustConfig};
    use crate::model::{ErrorModel, TimeSeries};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_pool(n: usize, len: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| (0..len).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect()
    }

    #[allow(clippy::ptr_arg)]
    fn eucl(a: &Vec<f64>, b: &Vec<f64>) -> Result<f64> {
        Ok(euclidean(a, b))
    }

    fn pdf_pool(pool: &[Vec<f64>], s: f64) -> Vec<ProbabilisticSeries> {
        pool.iter()
            .map(|v| ProbabilisticSeries::with_constant_error(v.clone(), ErrorModel::normal(s).unwrap()).unwrap())
            .collect()
    }

    #[test]
    fn technique_names_round_trip() {
        for t in Technique::ALL {
            assert_eq!(Technique::parse(t.name()), Some(t));
        }
        assert_eq!(Technique::parse("Euclidean"), Some(Technique::Euclid));
        assert_eq!(Technique::parse("dtw"), None);
    }

    #[test]
    fn spec_requires_tau_exactly_for_probabilistic() {
        assert!(QuerySpec::new(Technique::Munich, 1.0, None).is_err());
        assert!(QuerySpec::new(Technique::Dust, 1.0, Some(0.5)).is_err());
        assert!(QuerySpec::new(Technique::Proud, 1.0, Some(1.0)).is_err());
        assert!(QuerySpec::new(Technique::Proud, 1.0, Some(0.3)).is_ok());
        assert!(QuerySpec::new(Technique::Uma, 1.0, None).is_ok());
    }

    #[test]
    fn collection_hides_excluded_index() {
        let v = [10, 20, 30];
        let c = Collection::without(&v, 1);
        assert_eq!(c.len(), 2);
        assert_eq!(c.iter().map(|(i, _)| i).collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn range_query_edges_and_scan_oracle() {
        let pool = random_pool(50, 8, 1);
        let c = Collection::new(&pool);
        assert_eq!(range_query(&pool[3], c, 0.0, eucl).unwrap(), vec![3]);
        assert_eq!(range_query(&pool[3], c, 1e9, eucl).unwrap().len(), 50);
        let eps = 3.0;
        let want: Vec<usize> = (0..50).filter(|&i| euclidean(&pool[7], &pool[i]) <= eps).collect();
        assert_eq!(range_query(&pool[7], c, eps, eucl).unwrap(), want);
    }

    #[test]
    fn knn_matches_full_sort_and_breaks_ties_by_index() {
        let pool = random_pool(30, 5, 2);
        let c = Collection::new(&pool);
        let mut order: Vec<usize> = (0..30).collect();
        order.sort_by(|&a, &b| {
            euclidean(&pool[4], &pool[a])
                .partial_cmp(&euclidean(&pool[4], &pool[b]))
                .unwrap()
                .then(a.cmp(&b))
        });
        assert_eq!(knn(&pool[4], c, 30, eucl).unwrap(), order);
        assert_eq!(knn(&pool[4], c, 1, eucl).unwrap(), vec![4]);
        assert!(knn(&pool[4], c, 31, eucl).is_err());

        let dup = vec![vec![1.0], vec![0.0], vec![1.0], vec![-1.0]];
        let got = knn(&vec![0.0], Collection::new(&dup), 4, eucl).unwrap();
        assert_eq!(got, vec![1, 0, 2, 3]);
    }

    #[test]
    fn ground_truth_small_and_sorted_oracle() {
        let pool: Vec<TimeSeries> = random_pool(10, 4, 3)
            .into_iter()
            .map(|v| TimeSeries::new(v).unwrap())
            .collect();
        let gt = ground_truth(pool[0].values(), Collection::new(&pool)).unwrap();
        assert_eq!(gt, (0..10).collect::<Vec<_>>());

        let pool = random_pool(40, 6, 4);
        let mut d: Vec<(usize, f64)> = (0..40)
            .filter(|&i| i != 5)
            .map(|i| (i, euclidean(&pool[5], &pool[i])))
            .collect();
        d.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let mut want: Vec<usize> = d[..10].iter().map(|p| p.0).collect();
        want.sort();
        assert_eq!(ground_truth(&pool[5], Collection::without(&pool, 5)).unwrap(), want);
        assert!(ground_truth(&pool[0], Collection::new(&pool[..9])).is_err());
    }

    #[test]
    fn calibration_with_exactly_ten_picks_farthest() {
        let pool = pdf_pool(&random_pool(11, 6, 5), 0.5);
        let tables = DustTables::new(DustConfig::default()).unwrap();
        let c = Collection::without(&pool, 0);
        let t = calibrate_thresholds(&pool[0], c, &tables).unwrap();
        let far = (1..11)
            .max_by(|&a, &b| {
                euclidean(pool[0].observations(), pool[a].observations())
                    .total_cmp(&euclidean(pool[0].observations(), pool[b].observations()))
            })
            .unwrap();
        assert_eq!(t.neighbor, far);
        assert_eq!(t, calibrate_thresholds(&pool[0], c, &tables).unwrap());
        assert!(calibrate_thresholds(&pool[0], Collection::new(&pool[..9]), &tables).is_err());
    }

    #[test]
    fn gaussian_thresholds_admit_same_members() {
        let pool = pdf_pool(&random_pool(60, 12, 6), 1.0);
        let tables = DustTables::new(DustConfig::default()).unwrap();
        tables.prepare(&pool).unwrap();
        for qi in 0..5 {
            let c = Collection::without(&pool, qi);
            let t = calibrate_thresholds(&pool[qi], c, &tables).unwrap();
            let by_eucl = range_query(&pool[qi], c, t.eps_eucl, |a, b| {
                Ok(euclidean(a.observations(), b.observations()))
            })
            .unwrap();
            let by_dust = range_query(&pool[qi], c, t.eps_dust, |a, b| dust(a, b, &tables)).unwrap();
            assert_eq!(by_eucl, by_dust);
            assert_eq!(by_eucl.len(), NEIGHBORS);
        }
    }

    fn tiny_multi(rng: &mut ChaCha8Rng) -> MultiObservationSeries {
        MultiObservationSeries::new(
            (0..2)
                .map(|_| (0..2).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn munich_query_matches_exhaustive_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let q = tiny_multi(&mut rng);
            let pool: Vec<MultiObservationSeries> = (0..5).map(|_| tiny_multi(&mut rng)).collect();
            let eps = rng.random_range(0.2..2.0);
            let tau = rng.random_range(0.05..0.95);
            let spec = QuerySpec::new(Technique::Munich, eps, Some(tau)).unwrap();
            let got = probabilistic_range_query(Uncertain::Samples(&q, Collection::new(&pool)), &spec).unwrap();
            let want: Vec<usize> = (0..5)
                .filter(|&i| munich_probability_exact(&q, &pool[i], eps, 2, 1000).unwrap() >= tau)
                .collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn certain_data_degenerates_to_euclidean() {
        let pool = random_pool(20, 4, 8);
        let eps = 2.5;
        let want = range_query(&pool[0], Collection::new(&pool), eps, eucl).unwrap();
        let multi: Vec<MultiObservationSeries> = pool
            .iter()
            .map(|v| MultiObservationSeries::certain(v).unwrap())
            .collect();
        let spec = QuerySpec::new(Technique::Munich, eps, Some(0.5)).unwrap();
        assert_eq!(
            probabilistic_range_query(Uncertain::Samples(&multi[0], Collection::new(&multi)), &spec).unwrap(),
            want
        );
        let pdf = pdf_pool(&pool, 1e-9);
        let mut spec = QuerySpec::new(Technique::Proud, eps, Some(0.5)).unwrap();
        spec.proud.assumed_std = Some(0.0);
        assert_eq!(
            probabilistic_range_query(Uncertain::Pdf(&pdf[0], Collection::new(&pdf)), &spec).unwrap(),
            want
        );
    }

    #[test]
    fn vanishing_tau_returns_everything_for_munich() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let q = tiny_multi(&mut rng);
        let pool: Vec<MultiObservationSeries> = (0..5).map(|_| tiny_multi(&mut rng)).collect();
        // larger than every upper bound
        let spec = QuerySpec::new(Technique::Munich, 10.0, Some(1e-12)).unwrap();
        let got = probabilistic_range_query(Uncertain::Samples(&q, Collection::new(&pool)), &spec).unwrap();
        assert_eq!(got.len(), 5);
    }

    #[test]
    fn mismatched_input_is_rejected() {
        let pdf = pdf_pool(&random_pool(3, 2, 10), 0.5);
        let spec = QuerySpec::new(Technique::Munich, 1.0, Some(0.5)).unwrap();
        assert!(matches!(
            probabilistic_range_query(Uncertain::Pdf(&pdf[0], Collection::new(&pdf)), &spec),
            Err(Error::TechniqueMismatch { .. })
        ));
    }

    proptest! {
        #[test]
        fn range_grows_with_eps(seed in 0u64..500, e1 in 0.0f64..6.0, e2 in 0.0f64..6.0) {
            let pool = random_pool(25, 5, seed);
            let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
            let a = range_query(&pool[0], Collection::new(&pool), lo, eucl).unwrap();
            let b = range_query(&pool[0], Collection::new(&pool), hi, eucl).unwrap();
            prop_assert!(a.iter().all(|i| b.contains(i)));
        }

        #[test]
        fn knn_is_prefix_closed(seed in 0u64..500, k in 1usize..24) {
            let pool = random_pool(25, 5, seed);
            let a = knn(&pool[0], Collection::new(&pool), k, eucl).unwrap();
            let b = knn(&pool[0], Collection::new(&pool), k + 1, eucl).unwrap();
            prop_assert_eq!(&a[..], &b[..k]);
        }

        #[test]
        fn munich_result_shrinks_with_tau(seed in 0u64..300, t1 in 0.01f64..0.99, t2 in 0.01f64..0.99) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let q = tiny_multi(&mut rng);
            let pool: Vec<MultiObservationSeries> = (0..5).map(|_| tiny_multi(&mut rng)).collect();
            let eps = rng.random_range(0.2..2.0);
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            let run = |t| {
                let spec = QuerySpec::new(Technique::Munich, eps, Some(t)).unwrap();
                probabilistic_range_query(Uncertain::Samples(&q, Collection::new(&pool)), &spec).unwrap()
            };
            let (a, b) = (run(lo), run(hi));
            prop_assert!(b.iter().all(|i| a.contains(i)));
        }

        #[test]
        fn bounds_prefilter_never_changes_munich_results(seed in 0u64..300) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let q = tiny_multi(&mut rng);
            let pool: Vec<MultiObservationSeries> = (0..5).map(|_| tiny_multi(&mut rng)).collect();
            let eps = rng.random_range(0.0..2.5);
            let p = MunichParams::default();
            for s in &pool {
                prop_assert_eq!(p.probability(&q, s, eps).unwrap(), p.probability_unfiltered(&q, s, eps).unwrap());
            }
        }
    }
}
