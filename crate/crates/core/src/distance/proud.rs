//! PROUD: the squared distance between two uncertain series is a sum of
//! independent per-timestamp terms, so by the CLT it is approximately normal
//! with the summed means and variances of `D_i²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ProbabilisticSeries;
use crate::special::inverse_normal_cdf;

/// Mean and variance of `Σ D_i²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceMoments {
    pub mean: f64,
    pub variance: f64,
}

impl DistanceMoments {
    /// Accumulate from `(μ_i, s_i²)` pairs, where `D_i ~ N(μ_i, s_i²)`:
    /// `E[D²] = μ² + s²` and `Var[D²] = 2s⁴ + 4μ²s²`.
    pub fn from_terms(terms: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let (mut mean, mut variance) = (0.0, 0.0);
        for (mu, s2) in terms {
            let mu2 = mu * mu;
            mean += mu2 + s2;
            variance += 2.0 * s2 * s2 + 4.0 * mu2 * s2;
        }
        Self { mean, variance }
    }

    /// Normalized threshold `(ε² − mean) / √variance`. With zero variance
    /// the comparison is deterministic and the score is ±∞.
    pub fn normalized_eps(&self, eps: f64) -> f64 {
        let eps2 = eps * eps;
        if self.variance > 0.0 {
            (eps2 - self.mean) / self.variance.sqrt()
        } else if self.mean <= eps2 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    }
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::LengthMismatch { left: a, right: b });
    }
    Ok(())
}

/// Moments using each series' own per-timestamp error stds.
pub fn proud_distance_moments(q: &ProbabilisticSeries, y: &ProbabilisticSeries) -> Result<DistanceMoments> {
    check_lengths(q.len(), y.len())?;
    Ok(DistanceMoments::from_terms(
        q.observations()
            .iter()
            .zip(y.observations())
            .zip(q.errors().iter().zip(y.errors()))
            .map(|((a, b), (ea, eb))| (a - b, ea.std() * ea.std() + eb.std() * eb.std())),
    ))
}

/// Moments under a single assumed std per side (0 for a certain side).
pub fn proud_distance_moments_assumed(q: &[f64], y: &[f64], q_std: f64, y_std: f64) -> Result<DistanceMoments> {
    check_lengths(q.len(), y.len())?;
    let s2 = q_std * q_std + y_std * y_std;
    Ok(DistanceMoments::from_terms(q.iter().zip(y).map(|(a, b)| (a - b, s2))))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProudDecision {
    pub accepted: bool,
    /// The normalized threshold `ε_norm`.
    pub score: f64,
    /// The acceptance limit `Φ⁻¹(τ)`.
    pub limit: f64,
}

/// Accept `y` iff `ε_norm ≥ Φ⁻¹(τ)`.
pub fn decide(moments: &DistanceMoments, eps: f64, tau: f64) -> Result<ProudDecision> {
    let limit = inverse_normal_cdf(tau)?;
    let score = moments.normalized_eps(eps);
    Ok(ProudDecision {
        accepted: score >= limit,
        score,
        limit,
    })
}

pub fn proud_accepts(q: &ProbabilisticSeries, y: &ProbabilisticSeries, eps: f64, tau: f64) -> Result<ProudDecision> {
    decide(&proud_distance_moments(q, y)?, eps, tau)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProudParams {
    /// PROUD models one error std for every timestamp. When set, this value
    /// replaces the per-timestamp stds on both sides.
    pub assumed_std: Option<f64>,
}

impl ProudParams {
    pub fn moments(&self, q: &ProbabilisticSeries, y: &ProbabilisticSeries) -> Result<DistanceMoments> {
        match self.assumed_std {
            Some(s) => proud_distance_moments_assumed(q.observations(), y.observations(), s, s),
            None => proud_distance_moments(q, y),
        }
    }

    /// `ε_norm` for `y` against `q`.
    pub fn score(&self, q: &ProbabilisticSeries, y: &ProbabilisticSeries, eps: f64) -> Result<f64> {
        Ok(self.moments(q, y)?.normalized_eps(eps))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ErrorModel;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn series(obs: Vec<f64>, std: f64) -> ProbabilisticSeries {
        ProbabilisticSeries::with_constant_error(obs, ErrorModel::normal(std).unwrap()).unwrap()
    }

    #[test]
    fn certain_data_gives_squared_euclidean() {
        let m = proud_distance_moments_assumed(&[0.0, 1.0], &[3.0, 5.0], 0.0, 0.0).unwrap();
        assert_eq!(m.mean, 25.0);
        assert_eq!(m.variance, 0.0);
    }

    #[test]
    fn chi_square_one_dof() {
        let m = DistanceMoments::from_terms([(0.0, 1.0)]);
        assert_eq!((m.mean, m.variance), (1.0, 2.0));
    }

    #[test]
    fn moments_match_monte_carlo() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let n = 100;
        let s = 0.5;
        let mu: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let m = DistanceMoments::from_terms(mu.iter().map(|&u| (u, s * s)));
        let draws = 1_000_000;
        let (mut count, mut mean, mut m2) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..draws {
            let mut d = 0.0;
            for &u in &mu {
                let z: f64 = StandardNormal.sample(&mut rng);
                let di = u + s * z;
                d += di * di;
            }
            count += 1.0;
            let delta = d - mean;
            mean += delta / count;
            m2 += delta * (d - mean);
        }
        let var = m2 / (count - 1.0);
        let se_mean = (m.variance / draws as f64).sqrt();
        assert!((mean - m.mean).abs() < 3.0 * se_mean, "{mean} vs {}", m.mean);
        // Var of the sample variance ≈ (μ4 − σ⁴)/N; for a near-normal sum
        // μ4 ≈ 3σ⁴ so the standard error is about σ²·√(2/N).
        let se_var = m.variance * (2.0 / draws as f64).sqrt();
        assert!((var - m.variance).abs() < 3.0 * se_var, "{var} vs {}", m.variance);
    }

    #[test]
    fn median_threshold_accepts_iff_eps_squared_covers_mean() {
        let q = series(vec![0.0, 0.0, 0.0], 0.5);
        let y = series(vec![1.0, -1.0, 0.5], 0.5);
        let m = proud_distance_moments(&q, &y).unwrap();
        for eps in [0.5, 1.0, 1.5, 2.0, 2.5] {
            let d = proud_accepts(&q, &y, eps, 0.5).unwrap();
            assert_eq!(d.accepted, eps * eps >= m.mean, "eps={eps}");
        }
    }

    #[test]
    fn zero_variance_falls_back_to_euclidean() {
        let m = proud_distance_moments_assumed(&[0.0, 0.0], &[3.0, 4.0], 0.0, 0.0).unwrap();
        assert!(decide(&m, 5.0, 0.99).unwrap().accepted);
        assert!(decide(&m, 5.0, 0.01).unwrap().accepted);
        assert!(!decide(&m, 4.999, 0.01).unwrap().accepted);
    }

    #[test]
    fn invalid_tau_and_lengths() {
        let q = series(vec![0.0], 1.0);
        let y = series(vec![0.0, 1.0], 1.0);
        assert!(proud_accepts(&q, &y, 1.0, 0.5).is_err());
        assert!(proud_accepts(&q, &q, 1.0, 1.0).is_err());
        assert!(proud_accepts(&q, &q, 1.0, 0.0).is_err());
    }

    #[test]
    fn assumed_std_overrides_per_timestamp_models() {
        let q = series(vec![0.0, 1.0], 0.4);
        let y = series(vec![1.0, 1.0], 1.0);
        let p = ProudParams { assumed_std: Some(0.7) };
        let m = p.moments(&q, &y).unwrap();
        let want = DistanceMoments::from_terms([(-1.0, 0.98), (0.0, 0.98)]);
        assert!((m.mean - want.mean).abs() < 1e-12 && (m.variance - want.variance).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn acceptance_is_monotone(seed in 0u64..5000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.random_range(1..30);
            let s = rng.random_range(0.05..2.0);
            let q = series((0..n).map(|_| rng.random_range(-2.0..2.0)).collect(), s);
            let y = series((0..n).map(|_| rng.random_range(-2.0..2.0)).collect(), s);
            let m = proud_distance_moments(&q, &y).unwrap();
            prop_assert!(m.mean >= 0.0 && m.variance > 0.0);
            let eps = rng.random_range(0.1..8.0);
            let tau = rng.random_range(0.01..0.99);
            if decide(&m, eps, tau).unwrap().accepted {
                prop_assert!(decide(&m, eps, tau * 0.5).unwrap().accepted);
                prop_assert!(decide(&m, eps * 1.1, tau).unwrap().accepted);
            }
        }
    }
}
