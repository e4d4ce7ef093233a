//! DUST distance with precomputed φ lookup tables.
//!
//! φ(Δ) is the density of the error difference `e_x − e_y` at lag Δ, i.e.
//! the likelihood that two observations Δ apart share the same true value.
//! It is tabulated by numerical integration of the cross-correlation of the
//! two error densities, symmetrized in Δ, and clamped below at `phi_min`.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ErrorKind, ErrorModel, ModelKey, ProbabilisticSeries};

pub const PHI_MIN: f64 = 1e-12;

/// Simpson panels per φ evaluation.
const QUADRATURE_PANELS: usize = 2000;

/// Table resolution relative to the larger of the two error stds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DustConfig {
    pub grid_step_factor: f64,
    pub max_delta_factor: f64,
    pub phi_min: f64,
}

impl Default for DustConfig {
    fn default() -> Self {
        Self {
            grid_step_factor: 0.01,
            max_delta_factor: 12.0,
            phi_min: PHI_MIN,
        }
    }
}

impl DustConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !(ok(self.grid_step_factor) && ok(self.max_delta_factor) && ok(self.phi_min) && self.phi_min < 1.0) {
            return Err(Error::InvalidParameter(format!("invalid DUST table config {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct DustTable {
    x: ErrorModel,
    y: ErrorModel,
    grid_step: f64,
    phi: Vec<f64>,
    // -ln φ(Δ_j) − k at every node
    excess: Vec<f64>,
    k: f64,
    phi_min: f64,
}

// Integral over u of f_x(u) f_y(u − Δ), restricted to the overlap of the
// two supports.
fn difference_density(x: &ErrorModel, y: &ErrorModel, delta: f64) -> f64 {
    let (xa, xb) = x.support();
    let (ya, yb) = y.support();
    let lo = xa.max(ya + delta);
    let hi = xb.min(yb + delta);
    if hi <= lo {
        return 0.0;
    }
    let n = QUADRATURE_PANELS;
    let h = (hi - lo) / n as f64;
    let f = |u: f64| x.density(u) * y.density(u - delta);
    let mut s = f(lo) + f(hi);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(lo + i as f64 * h);
    }
    s * h / 3.0
}

impl DustTable {
    pub fn build(x: ErrorModel, y: ErrorModel, grid_step: f64, max_delta: f64, phi_min: f64) -> Result<Self> {
        if !(grid_step.is_finite() && grid_step > 0.0 && max_delta.is_finite() && max_delta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "DUST table needs positive grid_step and max_delta, got {grid_step} and {max_delta}"
            )));
        }
        if !(phi_min > 0.0 && phi_min < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "phi_min must lie in (0, 1), got {phi_min}"
            )));
        }
        // The symmetrized φ does not depend on the order of the pair; fix one
        // so both orders give bit-identical tables.
        let (x, y) = if x.key() <= y.key() { (x, y) } else { (y, x) };
        let nodes = (max_delta / grid_step).ceil() as usize + 1;
        let even = x.kind() != ErrorKind::Exponential && y.kind() != ErrorKind::Exponential;
        let mut phi: Vec<f64> = (0..nodes)
            .map(|j| {
                let d = j as f64 * grid_step;
                let fwd = difference_density(&x, &y, d);
                if even {
                    fwd
                } else {
                    0.5 * (fwd + difference_density(&x, &y, -d))
                }
            })
            .collect();

        // Normalize so the symmetric density integrates to one over
        // [-max_delta, max_delta] (trapezoid rule on the nodes).
        let mut mass = phi.iter().sum::<f64>() - 0.5 * (phi[0] + phi[nodes - 1]);
        mass *= 2.0 * grid_step;
        if mass > 0.0 {
            phi.iter_mut().for_each(|p| *p /= mass);
        }
        phi.iter_mut().for_each(|p| *p = p.max(phi_min));

        let k = -phi[0].ln();
        let excess = phi.iter().map(|p| -p.ln() - k).collect();
        Ok(Self {
            x,
            y,
            grid_step,
            phi,
            excess,
            k,
            phi_min,
        })
    }

    /// Table with the default resolution for this pair.
    pub fn with_config(x: ErrorModel, y: ErrorModel, config: &DustConfig) -> Result<Self> {
        config.validate()?;
        let s = x.std().max(y.std());
        Self::build(
            x,
            y,
            config.grid_step_factor * s,
            config.max_delta_factor * s,
            config.phi_min,
        )
    }

    pub fn models(&self) -> (ErrorModel, ErrorModel) {
        (self.x, self.y)
    }

    pub fn grid_step(&self) -> f64 {
        self.grid_step
    }

    pub fn max_delta(&self) -> f64 {
        (self.phi.len() - 1) as f64 * self.grid_step
    }

    /// The reflexivity constant `k = −ln φ(0)`.
    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn phi_values(&self) -> &[f64] {
        &self.phi
    }

    /// `−ln φ(|Δ|) − k`, floored at zero. Between nodes the value is
    /// interpolated linearly in Δ², which is exact for Gaussian pairs.
    #[inline]
    pub fn excess(&self, delta: f64) -> f64 {
        let d = delta.abs();
        let pos = d / self.grid_step;
        let j = pos as usize;
        if j + 1 >= self.excess.len() {
            return (-self.phi_min.ln() - self.k).max(0.0);
        }
        let d0 = j as f64 * self.grid_step;
        let d1 = d0 + self.grid_step;
        let t = (d * d - d0 * d0) / (d1 * d1 - d0 * d0);
        let (e0, e1) = (self.excess[j], self.excess[j + 1]);
        (e0 + t * (e1 - e0)).max(0.0)
    }

    /// φ(|Δ|) from the table.
    pub fn phi(&self, delta: f64) -> f64 {
        (-(self.excess(delta) + self.k)).exp().max(self.phi_min)
    }
}

/// `√(−ln φ(|x − y|) − k)` for one pair of observations.
pub fn dust_point(x: f64, y: f64, table: &DustTable) -> f64 {
    table.excess(x - y).sqrt()
}

/// `build_dust_table` with the default `phi_min`.
pub fn build_dust_table(x: ErrorModel, y: ErrorModel, grid_step: f64, max_delta: f64) -> Result<DustTable> {
    DustTable::build(x, y, grid_step, max_delta, PHI_MIN)
}

fn pair_key(x: &ErrorModel, y: &ErrorModel) -> (ModelKey, ModelKey) {
    // Symmetrized tables are identical under swapping the pair.
    let (a, b) = (x.key(), y.key());
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Memoized tables for every error-model pair, shareable across threads.
#[derive(Debug, Default)]
pub struct DustTables {
    config: DustConfig,
    tables: RwLock<HashMap<(ModelKey, ModelKey), Arc<DustTable>>>,
}

impl DustTables {
    pub fn new(config: DustConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            tables: RwLock::default(),
        })
    }

    pub fn config(&self) -> &DustConfig {
        &self.config
    }

    pub fn get(&self, x: &ErrorModel, y: &ErrorModel) -> Option<Arc<DustTable>> {
        self.tables.read().unwrap().get(&pair_key(x, y)).cloned()
    }

    pub fn get_or_build(&self, x: &ErrorModel, y: &ErrorModel) -> Result<Arc<DustTable>> {
        if let Some(t) = self.get(x, y) {
            return Ok(t);
        }
        let table = Arc::new(DustTable::with_config(*x, *y, &self.config)?);
        let mut map = self.tables.write().unwrap();
        Ok(map.entry(pair_key(x, y)).or_insert(table).clone())
    }

    /// Build tables for every pair of error models appearing in `series`.
    pub fn prepare<'a>(&self, series: impl IntoIterator<Item = &'a ProbabilisticSeries>) -> Result<()> {
        let mut models: Vec<ErrorModel> = Vec::new();
        for s in series {
            for e in s.errors() {
                if !models.contains(e) {
                    models.push(*e);
                }
            }
        }
        for (i, a) in models.iter().enumerate() {
            for b in &models[i..] {
                self.get_or_build(a, b)?;
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.tables.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `√(Σ dust(x_i, y_i)²)`. Every per-timestamp model pair needs a table in
/// `tables` already.
pub fn dust(x: &ProbabilisticSeries, y: &ProbabilisticSeries, tables: &DustTables) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let (xe, ye) = (x.errors(), y.errors());
    let mut current: Option<(ErrorModel, ErrorModel, Arc<DustTable>)> = None;
    let mut sum = 0.0;
    for (i, (a, b)) in x.observations().iter().zip(y.observations()).enumerate() {
        let table = match &current {
            Some((cx, cy, t)) if *cx == xe[i] && *cy == ye[i] => t,
            _ => {
                let t = tables.get(&xe[i], &ye[i]).ok_or_else(|| Error::MissingDustTable {
                    x: xe[i].to_string(),
                    y: ye[i].to_string(),
                })?;
                &current.insert((xe[i], ye[i], t)).2
            }
        };
        sum += table.excess(a - b);
    }
    Ok(sum.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::lp::euclidean;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn normal(s: f64) -> ErrorModel {
        ErrorModel::normal(s).unwrap()
    }

    #[test]
    fn gaussian_pair_matches_closed_form() {
        // e_x − e_y ~ N(0, 2σ²), so −ln φ(Δ) − k = Δ²/(4σ²).
        for sigma in [0.2, 1.0, 1.7] {
            let t = DustTable::with_config(normal(sigma), normal(sigma), &DustConfig::default()).unwrap();
            let want_k = (2.0 * sigma * std::f64::consts::PI.sqrt()).ln();
            assert!((t.k() - want_k).abs() < 1e-9, "k {} vs {want_k}", t.k());
            for j in 0..=60 {
                let d = j as f64 * 0.1 * sigma;
                let want = d * d / (4.0 * sigma * sigma);
                assert!((t.excess(d) - want).abs() < 1e-8 * (1.0 + want), "σ={sigma} Δ={d}");
            }
        }
    }

    #[test]
    fn unequal_gaussians_use_summed_variance() {
        let t = DustTable::with_config(normal(0.4), normal(1.0), &DustConfig::default()).unwrap();
        for d in [0.1, 0.5, 1.0, 2.0, 4.0] {
            let want = d * d / (2.0 * (0.16 + 1.0));
            assert!((t.excess(d) - want).abs() < 1e-8, "Δ={d}");
        }
    }

    #[test]
    fn dust_point_is_scaled_absolute_difference() {
        let sigma = 0.8;
        let t = DustTable::with_config(normal(sigma), normal(sigma), &DustConfig::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let x = rng.random_range(-3.0..3.0);
            let y = x + rng.random_range(-6.0 * sigma..6.0 * sigma);
            let want = (x - y).abs() / (2.0 * sigma);
            let got = dust_point(x, y, &t);
            assert!((got - want).abs() <= 1e-6 + 1e-6 * want, "{got} vs {want}");
        }
    }

    #[test]
    fn phi_peaks_at_zero_for_symmetric_kinds() {
        for kind in [ErrorKind::Normal, ErrorKind::Uniform] {
            let m = ErrorModel::new(kind, 0.5).unwrap();
            let t = DustTable::with_config(m, m, &DustConfig::default()).unwrap();
            let phi = t.phi_values();
            assert!(phi.windows(2).all(|w| w[0] >= w[1]), "{kind}");
        }
    }

    #[test]
    fn uniform_pair_clamps_beyond_joint_support() {
        let sigma = 0.5;
        let m = ErrorModel::uniform(sigma).unwrap();
        let t = DustTable::with_config(m, m, &DustConfig::default()).unwrap();
        let edge = 2.0 * sigma * 3f64.sqrt();
        for d in [edge * 1.01, edge * 1.5, 3.0 * edge, 100.0] {
            assert!((t.phi(d) / PHI_MIN - 1.0).abs() < 1e-9, "Δ={d}");
        }
        // inside the support φ follows the triangle (2a − Δ)/(4a²)
        let a = sigma * 3f64.sqrt();
        for d in [0.0, 0.3, 0.9, 1.5] {
            let want = (2.0 * a - d) / (4.0 * a * a);
            assert!((t.phi(d) - want).abs() < 1e-3 * want, "Δ={d}: {} vs {want}", t.phi(d));
        }
        assert!(dust_point(0.0, 100.0, &t).is_finite());
    }

    #[test]
    fn reflexive_and_symmetric() {
        let models = [
            normal(0.3),
            ErrorModel::uniform(0.6).unwrap(),
            ErrorModel::exponential(0.4).unwrap(),
        ];
        for a in &models {
            for b in &models {
                let ab = DustTable::with_config(*a, *b, &DustConfig::default()).unwrap();
                let ba = DustTable::with_config(*b, *a, &DustConfig::default()).unwrap();
                if a == b {
                    assert_eq!(dust_point(1.25, 1.25, &ab), 0.0);
                }
                for (x, y) in [(0.0, 0.3), (1.0, -0.5), (2.0, 2.2)] {
                    assert!((dust_point(x, y, &ab) - dust_point(y, x, &ba)).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn dust_is_monotone_on_the_grid() {
        let m = ErrorModel::exponential(0.5).unwrap();
        let t = DustTable::with_config(m, normal(0.5), &DustConfig::default()).unwrap();
        let mut prev = 0.0;
        for j in 0..2000 {
            let v = dust_point(0.0, j as f64 * t.grid_step() * 0.37, &t);
            assert!(v >= prev - 1e-12);
            prev = v;
        }
    }

    #[test]
    fn invalid_table_parameters() {
        assert!(build_dust_table(normal(1.0), normal(1.0), 0.0, 1.0).is_err());
        assert!(build_dust_table(normal(1.0), normal(1.0), 0.1, -1.0).is_err());
    }

    #[test]
    fn series_distance_reflexive_and_missing_table_error() {
        let m = normal(0.5);
        let x = ProbabilisticSeries::with_constant_error(vec![0.1, 0.7, -0.2], m).unwrap();
        let tables = DustTables::new(DustConfig::default()).unwrap();
        assert!(matches!(dust(&x, &x, &tables), Err(Error::MissingDustTable { .. })));
        tables.prepare([&x]).unwrap();
        assert_eq!(dust(&x, &x, &tables).unwrap(), 0.0);
    }

    #[test]
    fn mixed_models_compose_pointwise() {
        let n = normal(0.4);
        let u = ErrorModel::uniform(1.0).unwrap();
        let x = ProbabilisticSeries::new(vec![0.2, -0.4], vec![n, u]).unwrap();
        let y = ProbabilisticSeries::new(vec![0.9, 0.3], vec![u, n]).unwrap();
        let tables = DustTables::new(DustConfig::default()).unwrap();
        tables.prepare([&x, &y]).unwrap();
        let t_nu = DustTable::with_config(n, u, &DustConfig::default()).unwrap();
        let t_un = DustTable::with_config(u, n, &DustConfig::default()).unwrap();
        let a = dust_point(0.2, 0.9, &t_nu);
        let b = dust_point(-0.4, 0.3, &t_un);
        let want = (a * a + b * b).sqrt();
        assert!((dust(&x, &y, &tables).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn gaussian_dust_ranks_like_euclidean() {
        let sigma = 1.0;
        let m = normal(sigma);
        let tables = DustTables::new(DustConfig::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pool: Vec<ProbabilisticSeries> = (0..60)
            .map(|_| {
                let v = (0..24).map(|_| rng.random_range(-2.0..2.0)).collect();
                ProbabilisticSeries::with_constant_error(v, m).unwrap()
            })
            .collect();
        tables.prepare(&pool).unwrap();
        let q = &pool[0];
        let mut by_dust: Vec<(f64, usize)> = pool
            .iter()
            .enumerate()
            .map(|(i, s)| (dust(q, s, &tables).unwrap(), i))
            .collect();
        let mut by_eucl: Vec<(f64, usize)> = pool
            .iter()
            .enumerate()
            .map(|(i, s)| (euclidean(q.observations(), s.observations()), i))
            .collect();
        by_dust.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        by_eucl.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let ids = |v: &[(f64, usize)]| v.iter().map(|p| p.1).collect::<Vec<_>>();
        assert_eq!(ids(&by_dust), ids(&by_eucl));
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]

        #[test]
        fn reflexive_symmetric_nonnegative_under_mixed_models(
            picks in proptest::collection::vec((0usize..4, 0usize..4, -3.0f64..3.0, -3.0f64..3.0), 1..24)
        ) {
            static TABLES: std::sync::OnceLock<DustTables> = std::sync::OnceLock::new();
            let tables = TABLES.get_or_init(|| DustTables::new(DustConfig::default()).unwrap());
            let pool = [
                ErrorModel::normal(0.4).unwrap(),
                ErrorModel::normal(1.0).unwrap(),
                ErrorModel::uniform(0.5).unwrap(),
                ErrorModel::exponential(0.7).unwrap(),
            ];
            let x = ProbabilisticSeries::new(
                picks.iter().map(|p| p.2).collect(),
                picks.iter().map(|p| pool[p.0]).collect(),
            ).unwrap();
            let y = ProbabilisticSeries::new(
                picks.iter().map(|p| p.3).collect(),
                picks.iter().map(|p| pool[p.1]).collect(),
            ).unwrap();
            tables.prepare([&x, &y]).unwrap();
            let d = dust(&x, &y, tables).unwrap();
            proptest::prop_assert!(d >= 0.0 && d.is_finite());
            proptest::prop_assert_eq!(d, dust(&y, &x, tables).unwrap());
            proptest::prop_assert_eq!(dust(&x, &x, tables).unwrap(), 0.0);
        }
    }
}
