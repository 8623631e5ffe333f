//! The brute-force random energy model at small `N`: i.i.d. Gaussian energies
//! for all `2^N` configurations, the partition function, free energy and the
//! exact Gibbs measure. Everything here is the oracle the `O(k)` constructions
//! are checked against, so it is deliberately direct.
//!
//! Sign convention: configuration `i` gets weight
//! `exp(-(beta/beta_c) * sqrt(2 log 2^N) * X_i) = exp(-beta * sqrt(N) * X_i)`,
//! so the smallest `X` always carries the largest weight and "the minimum"
//! means `X_{1,2^N}`.

use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Critical inverse temperature `beta_c = sqrt(2 ln 2)`.
pub fn beta_c() -> f64 {
    (2.0 * std::f64::consts::LN_2).sqrt()
}

/// The Gibbs exponent scale `beta * sqrt(N)`, written in its order-statistics
/// form `(beta/beta_c) * sqrt(2 log 2^N)`; the two agree to rounding.
pub fn gibbs_scale(n_exp: u32, beta: f64) -> f64 {
    (beta / beta_c()) * (2.0 * std::f64::consts::LN_2 * n_exp as f64).sqrt()
}

/// Brute-force memory guard: `2^25` doubles is the desk-scale limit.
pub const MAX_BRUTE_N: u32 = 25;

/// All `2^N` standard Gaussian energies plus the permutation that sorts them
/// ascending.
#[derive(Debug, Clone)]
pub struct EnergySample {
    n_exp: u32,
    x: Vec<f64>,
    sorted_idx: Vec<u32>,
}

impl EnergySample {
    /// Draw `2^N` i.i.d. standard Gaussians, `1 <= N <= 25`.
    pub fn sample(n_exp: u32, rng: &mut impl Rng) -> Result<Self> {
        if n_exp == 0 || n_exp > MAX_BRUTE_N {
            return Err(Error::Resource(format!(
                "system size N = {n_exp} outside 1..={MAX_BRUTE_N} for brute force"
            )));
        }
        let size = 1usize << n_exp;
        let x: Vec<f64> = (0..size).map(|_| StandardNormal.sample(rng)).collect();
        Ok(Self::from_values_unchecked(n_exp, x))
    }

    /// Build from explicit energies; `values.len()` must be `2^N`.
    pub fn from_values(n_exp: u32, x: Vec<f64>) -> Result<Self> {
        if n_exp == 0 || n_exp > MAX_BRUTE_N {
            return Err(Error::Resource(format!(
                "system size N = {n_exp} outside 1..={MAX_BRUTE_N}"
            )));
        }
        if x.len() != 1usize << n_exp {
            return Err(Error::domain(format!(
                "got {} energies, expected 2^{n_exp}",
                x.len()
            )));
        }
        Ok(Self::from_values_unchecked(n_exp, x))
    }

    fn from_values_unchecked(n_exp: u32, x: Vec<f64>) -> Self {
        let mut sorted_idx: Vec<u32> = (0..x.len() as u32).collect();
        sorted_idx.sort_unstable_by(|&a, &b| x[a as usize].total_cmp(&x[b as usize]));
        EnergySample { n_exp, x, sorted_idx }
    }

    pub fn n(&self) -> u32 {
        self.n_exp
    }

    /// `2^N`.
    pub fn size(&self) -> usize {
        self.x.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.x
    }

    /// Permutation such that `values()[sorted_idx()[0]]` is the minimum.
    pub fn sorted_idx(&self) -> &[u32] {
        &self.sorted_idx
    }

    /// `X_{j,2^N}`, 1-based rank.
    pub fn order_stat(&self, j: usize) -> f64 {
        self.x[self.sorted_idx[j - 1] as usize]
    }
}

/// Free-function form of [`EnergySample::sample`].
pub fn sample_energies(n_exp: u32, rng: &mut impl Rng) -> Result<EnergySample> {
    EnergySample::sample(n_exp, rng)
}

/// A normalized weight vector over distinct configuration indices.
#[derive(Debug, Clone)]
pub struct DiscreteMeasure {
    support: Vec<u64>,
    w: Vec<f64>,
}

impl DiscreteMeasure {
    /// Normalize `log_w` by max-shift; no exponential ever overflows.
    pub fn from_log_weights(support: Vec<u64>, log_w: &[f64]) -> Self {
        assert_eq!(support.len(), log_w.len());
        assert!(!support.is_empty());
        let m = log_w.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let mut w: Vec<f64> = log_w.iter().map(|&lw| (lw - m).exp()).collect();
        let z: f64 = w.iter().sum();
        for wi in &mut w {
            *wi /= z;
        }
        DiscreteMeasure { support, w }
    }

    /// Validating constructor: weights nonnegative and summing to 1 within
    /// 1e-12, support entries distinct.
    pub fn try_new(support: Vec<u64>, w: Vec<f64>) -> Result<Self> {
        if support.len() != w.len() || support.is_empty() {
            return Err(Error::domain("support/weight length mismatch or empty"));
        }
        if w.iter().any(|&x| !(x >= 0.0)) {
            return Err(Error::domain("weights must be nonnegative"));
        }
        let total: f64 = w.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("weights sum to {total}, not 1")));
        }
        let mut seen = std::collections::HashSet::with_capacity(support.len());
        if !support.iter().all(|s| seen.insert(*s)) {
            return Err(Error::domain("support entries must be distinct"));
        }
        Ok(DiscreteMeasure { support, w })
    }

    pub fn uniform(support: Vec<u64>) -> Self {
        let k = support.len();
        assert!(k > 0);
        DiscreteMeasure {
            support,
            w: vec![1.0 / k as f64; k],
        }
    }

    pub fn point_mass(index: u64) -> Self {
        DiscreteMeasure {
            support: vec![index],
            w: vec![1.0],
        }
    }

    #[cfg(test)]
    pub(crate) fn raw(support: Vec<u64>, w: Vec<f64>) -> Self {
        DiscreteMeasure { support, w }
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn support(&self) -> &[u64] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn total(&self) -> f64 {
        self.w.iter().sum()
    }

    /// Mass of the first `m` support entries.
    pub fn head_mass(&self, m: usize) -> f64 {
        self.w[..m.min(self.w.len())].iter().sum()
    }
}

/// `log Z_N(beta)` by max-shifted log-sum-exp; finite for every `beta >= 0`
/// and `N` in range.
pub fn partition_function_log(sample: &EnergySample, beta: f64) -> Result<f64> {
    if !(beta >= 0.0) {
        return Err(Error::domain(format!("beta = {beta}, need beta >= 0")));
    }
    let c = beta * (sample.n() as f64).sqrt();
    // log sum exp of -c * x_i; the max term sits at the minimal energy.
    let x_min = sample.x[sample.sorted_idx[0] as usize];
    let m = -c * x_min;
    let acc: f64 = sample.x.iter().map(|&x| (-c * x - m).exp()).sum();
    Ok(m + acc.ln())
}

/// Finite-volume free energy `F_N(beta) = -log Z_N / (beta N)`.
pub fn free_energy(sample: &EnergySample, beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::domain(format!("beta = {beta}, need beta > 0")));
    }
    Ok(-partition_function_log(sample, beta)? / (beta * sample.n() as f64))
}

/// The nonrandom limit `F(beta)`: `-beta/2 - beta_c^2/(2 beta)` below the
/// critical temperature and the frozen value `-beta_c` above it.
pub fn free_energy_limit(beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::domain(format!("beta = {beta}, need beta > 0")));
    }
    let bc = beta_c();
    if beta < bc {
        Ok(-beta / 2.0 - bc * bc / (2.0 * beta))
    } else {
        Ok(-bc)
    }
}

/// The exact Gibbs measure, weights listed in ascending-energy order (the
/// minimum first, weights nonincreasing). Support entries are the original
/// configuration indices.
pub fn gibbs_measure(sample: &EnergySample, beta: f64) -> Result<DiscreteMeasure> {
    if !(beta >= 0.0) {
        return Err(Error::domain(format!("beta = {beta}, need beta >= 0")));
    }
    let c = beta * (sample.n() as f64).sqrt();
    let support: Vec<u64> = sample.sorted_idx.iter().map(|&i| i as u64).collect();
    let log_w: Vec<f64> = sample
        .sorted_idx
        .iter()
        .map(|&i| -c * sample.x[i as usize])
        .collect();
    Ok(DiscreteMeasure::from_log_weights(support, &log_w))
}

/// The largest Gibbs weight of a fresh `2^N` sample, computed with O(1)
/// memory (running minimum plus streaming log-sum-exp). Equals
/// `gibbs_measure(sample, beta).weights()[0]` exactly for the same draws.
pub fn gibbs_max_weight_streaming(n_exp: u32, beta: f64, rng: &mut impl Rng) -> Result<f64> {
    if n_exp == 0 || n_exp > 63 {
        return Err(Error::Resource(format!("system size N = {n_exp} outside 1..=63")));
    }
    if !(beta >= 0.0) {
        return Err(Error::domain(format!("beta = {beta}, need beta >= 0")));
    }
    let c = beta * (n_exp as f64).sqrt();
    let mut shift = f64::NEG_INFINITY; // running max of -c*x
    let mut acc = 0.0; // sum of exp(-c*x - shift)
    for _ in 0..(1u64 << n_exp) {
        let x: f64 = StandardNormal.sample(rng);
        let lw = -c * x;
        if lw > shift {
            acc = acc * (shift - lw).exp() + 1.0;
            shift = lw;
        } else {
            acc += (lw - shift).exp();
        }
    }
    Ok(1.0 / acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn sample_respects_resource_guard() {
        let mut rng = substream(30, 0);
        assert!(EnergySample::sample(0, &mut rng).is_err());
        assert!(EnergySample::sample(26, &mut rng).is_err());
    }

    #[test]
    fn size_two_sort() {
        let s = EnergySample::from_values(1, vec![0.5, -1.0]).unwrap();
        assert_eq!(s.sorted_idx(), &[1, 0]);
        assert_eq!(s.order_stat(1), -1.0);
        assert_eq!(s.order_stat(2), 0.5);
    }

    #[test]
    fn sorted_idx_is_ascending_permutation() {
        let mut rng = substream(31, 0);
        let s = EnergySample::sample(10, &mut rng).unwrap();
        let mut seen = vec![false; s.size()];
        for &i in s.sorted_idx() {
            assert!(!seen[i as usize]);
            seen[i as usize] = true;
        }
        for j in 2..=s.size() {
            assert!(s.order_stat(j) >= s.order_stat(j - 1));
        }
    }

    #[test]
    fn sample_mean_is_centered() {
        let mut rng = substream(32, 0);
        let s = EnergySample::sample(20, &mut rng).unwrap();
        let mean = s.values().iter().sum::<f64>() / s.size() as f64;
        assert!(mean.abs() <= 3.0 / (s.size() as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn minimum_sits_near_extreme_value_location() {
        // Soft trend: min of 2^20 Gaussians is near -sqrt(2 * 20 * ln 2).
        let mut rng = substream(33, 0);
        let s = EnergySample::sample(20, &mut rng).unwrap();
        let expected = -(2.0 * 20.0 * std::f64::consts::LN_2).sqrt();
        assert!(
            (s.order_stat(1) - expected).abs() < 0.75,
            "min {} vs {expected}",
            s.order_stat(1)
        );
    }

    #[test]
    fn partition_log_at_beta_zero() {
        let mut rng = substream(34, 0);
        let s = EnergySample::sample(8, &mut rng).unwrap();
        let lz = partition_function_log(&s, 0.0).unwrap();
        assert!((lz - 8.0 * std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn equal_energies_give_log2_partition() {
        let s = EnergySample::from_values(1, vec![0.0, 0.0]).unwrap();
        for beta in [0.0, 1.0, 7.3] {
            let lz = partition_function_log(&s, beta).unwrap();
            assert!((lz - std::f64::consts::LN_2).abs() < 1e-14);
        }
    }

    #[test]
    fn no_overflow_at_extreme_beta() {
        let mut rng = substream(35, 0);
        let s = EnergySample::sample(12, &mut rng).unwrap();
        let beta = 50.0 * beta_c();
        let lz = partition_function_log(&s, beta).unwrap();
        assert!(lz.is_finite());
        let g = gibbs_measure(&s, beta).unwrap();
        assert!((g.total() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn exponent_identity_beta_sqrt_n() {
        // beta * sqrt(N) == (beta/beta_c) * sqrt(2 log 2^N) to 1e-12 relative.
        for n_exp in 1..=64u32 {
            for beta in [0.3, 1.0, beta_c(), 2.0 * beta_c(), 11.0] {
                let direct = beta * (n_exp as f64).sqrt();
                let scaled = gibbs_scale(n_exp, beta);
                assert!(
                    ((direct - scaled) / direct).abs() <= 1e-12,
                    "N={n_exp}, beta={beta}: {direct} vs {scaled}"
                );
            }
        }
    }

    #[test]
    fn free_energy_requires_positive_beta() {
        let s = EnergySample::from_values(1, vec![0.0, 0.0]).unwrap();
        assert!(free_energy(&s, 0.0).is_err());
        let f = free_energy(&s, 2.0).unwrap();
        assert!((f - (-std::f64::consts::LN_2 / 2.0)).abs() < 1e-14);
    }

    #[test]
    fn neg_beta_f_is_convex_in_beta() {
        // beta -> log Z(beta) is convex: second differences >= -1e-9.
        let mut rng = substream(36, 0);
        let s = EnergySample::sample(10, &mut rng).unwrap();
        let betas: Vec<f64> = (1..40).map(|i| 0.1 * i as f64).collect();
        let lz: Vec<f64> = betas
            .iter()
            .map(|&b| partition_function_log(&s, b).unwrap())
            .collect();
        for w in lz.windows(3) {
            assert!(w[2] - 2.0 * w[1] + w[0] >= -1e-9);
        }
    }

    #[test]
    fn free_energy_limit_values() {
        let bc = beta_c();
        assert!((free_energy_limit(bc).unwrap() + bc).abs() < 1e-15);
        assert!((free_energy_limit(2.0 * bc).unwrap() + bc).abs() < 1e-15);
        // Below criticality: -beta/2 - beta_c^2/(2 beta); at beta_c/2 this is
        // -1.25 * beta_c.
        let f = free_energy_limit(bc / 2.0).unwrap();
        assert!((f + 1.25 * bc).abs() < 1e-14);
        assert!(free_energy_limit(0.0).is_err());
        // Continuity at the critical point.
        let left = free_energy_limit(bc - 1e-7).unwrap();
        assert!((left - (-bc)).abs() <= 1e-12);
    }

    #[test]
    fn gibbs_two_state_hand_computation() {
        // N = 1, energies (0, t): weights (1/(1+e^{-beta t}), e^{-beta t}/(1+e^{-beta t})).
        let t = 0.8;
        let s = EnergySample::from_values(1, vec![0.0, t]).unwrap();
        for beta in [0.5, 1.3, 4.0] {
            let g = gibbs_measure(&s, beta).unwrap();
            let want0 = 1.0 / (1.0 + (-beta * t).exp());
            assert!((g.weights()[0] - want0).abs() < 1e-14, "beta {beta}");
            assert_eq!(g.support()[0], 0);
            assert!((g.total() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn gibbs_uniform_cases() {
        let s = EnergySample::from_values(2, vec![0.3, 0.3, 0.3, 0.3]).unwrap();
        let g = gibbs_measure(&s, 5.0).unwrap();
        for &w in g.weights() {
            assert!((w - 0.25).abs() < 1e-14);
        }
        let mut rng = substream(37, 0);
        let s = EnergySample::sample(6, &mut rng).unwrap();
        let g = gibbs_measure(&s, 0.0).unwrap();
        for &w in g.weights() {
            assert!((w - 1.0 / 64.0).abs() < 1e-14);
        }
    }

    #[test]
    fn gibbs_weights_nonincreasing_and_normalized() {
        let mut rng = substream(38, 0);
        for beta_mult in [0.5, 1.0, 2.0, 10.0, 50.0] {
            let s = EnergySample::sample(8, &mut rng).unwrap();
            let g = gibbs_measure(&s, beta_mult * beta_c()).unwrap();
            assert!((g.total() - 1.0).abs() <= 1e-12);
            assert!(g.weights().windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn streaming_max_weight_equals_dense_path() {
        for n_exp in [6u32, 10, 12] {
            let beta = 2.0 * beta_c();
            let mut rng = substream(39, n_exp as u64);
            let dense = {
                let s = EnergySample::sample(n_exp, &mut rng).unwrap();
                gibbs_measure(&s, beta).unwrap().weights()[0]
            };
            let mut rng = substream(39, n_exp as u64);
            let streaming = gibbs_max_weight_streaming(n_exp, beta, &mut rng).unwrap();
            assert!(
                (dense - streaming).abs() <= 1e-12,
                "N={n_exp}: dense {dense} vs streaming {streaming}"
            );
        }
    }

    #[test]
    fn measure_constructors_validate() {
        assert!(DiscreteMeasure::try_new(vec![0, 1], vec![0.5, 0.6]).is_err());
        assert!(DiscreteMeasure::try_new(vec![0, 0], vec![0.5, 0.5]).is_err());
        assert!(DiscreteMeasure::try_new(vec![0, 1], vec![-0.1, 1.1]).is_err());
        let m = DiscreteMeasure::try_new(vec![3, 9], vec![0.25, 0.75]).unwrap();
        assert_eq!(m.head_mass(1), 0.25);
        let u = DiscreteMeasure::uniform(vec![1, 2, 3, 4]);
        assert_eq!(u.weights(), &[0.25; 4]);
        let p = DiscreteMeasure::point_mass(7);
        assert_eq!(p.support(), &[7]);
        assert_eq!(p.weights(), &[1.0]);
    }
}
