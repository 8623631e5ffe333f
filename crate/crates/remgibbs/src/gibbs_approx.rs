//! Truncated approximations of the Gibbs measure and the series controlling
//! their quality.
//!
//! Two approximations of the `2^N`-point Gibbs measure live here:
//!
//! * `mu1` keeps the `k_N` lowest-energy configurations of an explicit
//!   sample and renormalizes.
//! * `mu2` replaces the rescaled energy spacings by their limit law: the
//!   `j`-th rank (1-based) gets weight `exp(-(beta/beta_c) * T_{j-1})` with
//!   `T_m = sum_{i<=m} W_i / i` an exponential ladder. The gap between
//!   consecutive ranks is `W_j / j`, an Exp(j) variable, which is exactly the
//!   limiting law of the rescaled Gaussian gap `sqrt(2 log n)(X_{j+1,n} - X_{j,n})`.
//!
//! The total variation convention is `d(mu, nu) = sum |mu_i - nu_i|`, ranging
//! over `[0, 2]` (the sup over test functions with sup-norm 1).

use crate::bounds::BoundReport;
use crate::error::{Error, Result};
use crate::order_stats::ExponentialLadder;
use crate::rem_core::{beta_c, gibbs_scale, DiscreteMeasure, EnergySample};
use crate::rng::lane_substream;
use crate::stats::mean_and_se;
use rand_distr::{Distribution, Exp1};
use std::collections::HashMap;

/// Truncation size schedule `k_N = ceil(N * log_p N)`, `log_p` the `p`-times
/// iterated natural logarithm, clamped to at least 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KSchedule {
    IteratedLog { p: u32 },
    Fixed { k: usize },
}

impl KSchedule {
    pub fn iterated_log(p: u32) -> Self {
        KSchedule::IteratedLog { p }
    }

    pub fn fixed(k: usize) -> Self {
        KSchedule::Fixed { k }
    }

    /// `k_N` at system size `N`.
    pub fn k(&self, n_exp: u32) -> Result<usize> {
        match *self {
            KSchedule::Fixed { k } => {
                if k < 2 {
                    return Err(Error::domain(format!("fixed k = {k}, need k >= 2")));
                }
                Ok(k)
            }
            KSchedule::IteratedLog { p } => {
                if p < 1 {
                    return Err(Error::domain("iterated-log depth p must be >= 1"));
                }
                if n_exp < 4 {
                    return Err(Error::domain(format!(
                        "system size N = {n_exp}, need N >= 4 for the schedule"
                    )));
                }
                let mut v = n_exp as f64;
                for _ in 0..p {
                    if v <= 0.0 {
                        return Err(Error::domain(format!(
                            "iterated log undefined at N = {n_exp}, p = {p}"
                        )));
                    }
                    v = v.ln();
                }
                if v <= 0.0 {
                    return Err(Error::domain(format!(
                        "iterated log nonpositive at N = {n_exp}, p = {p}"
                    )));
                }
                Ok(((n_exp as f64 * v).ceil() as usize).max(2))
            }
        }
    }

    /// `(log k_N)(log N)/N`, the quantity that must vanish for the ladder
    /// approximation to take over.
    pub fn growth_ratio(&self, n_exp: u32) -> Result<f64> {
        let k = self.k(n_exp)? as f64;
        Ok(k.ln() * (n_exp as f64).ln() / n_exp as f64)
    }

    /// Flags whether the growth ratio is already below `threshold` at this `N`.
    pub fn satisfies_growth(&self, n_exp: u32, threshold: f64) -> Result<bool> {
        Ok(self.growth_ratio(n_exp)? <= threshold)
    }
}

/// Convenience form: `k_N` for the iterated-log schedule of depth `p`.
pub fn k_schedule(n_exp: u32, p: u32) -> Result<usize> {
    KSchedule::iterated_log(p).k(n_exp)
}

fn check_supercritical(beta: f64) -> Result<f64> {
    let bc = beta_c();
    if !(beta > bc) {
        return Err(Error::domain(format!(
            "beta = {beta} not above beta_c = {bc}; the truncated measures need beta/beta_c > 1"
        )));
    }
    Ok(beta / bc)
}

/// Truncation of the exact Gibbs measure to its `k_n` lowest-energy
/// configurations, renormalized. Support entries are configuration indices,
/// lowest energy first.
pub fn mu1(sample: &EnergySample, beta: f64, k_n: usize) -> Result<DiscreteMeasure> {
    check_supercritical(beta)?;
    if k_n == 0 || k_n > sample.size() {
        return Err(Error::domain(format!(
            "truncation k_n = {k_n} outside 1..=2^{} ", sample.n()
        )));
    }
    let c = gibbs_scale(sample.n(), beta);
    let x1 = sample.order_stat(1);
    let support: Vec<u64> = sample.sorted_idx()[..k_n].iter().map(|&i| i as u64).collect();
    let log_w: Vec<f64> = sample.sorted_idx()[..k_n]
        .iter()
        .map(|&i| -c * (sample.values()[i as usize] - x1))
        .collect();
    Ok(DiscreteMeasure::from_log_weights(support, &log_w))
}

/// The ladder measure on ranks `0..k_n`: rank `j` (0-based) gets weight
/// `exp(-(beta/beta_c) * T_j)`, so the first weight is 1 before
/// normalization and the rank gaps are `W_j / j`.
pub fn mu2(ladder: &ExponentialLadder, beta: f64, k_n: usize) -> Result<DiscreteMeasure> {
    let r = check_supercritical(beta)?;
    if k_n == 0 {
        return Err(Error::domain("truncation k_n = 0, need k_n >= 1"));
    }
    if ladder.len() + 1 < k_n {
        return Err(Error::domain(format!(
            "ladder length {} too short for k_n = {k_n} (need k_n - 1 draws)",
            ladder.len()
        )));
    }
    let support: Vec<u64> = (0..k_n as u64).collect();
    let log_w: Vec<f64> = (0..k_n).map(|j| -r * ladder.weighted_sum(j)).collect();
    Ok(DiscreteMeasure::from_log_weights(support, &log_w))
}

/// Bound on the mass the truncation discards:
/// `2 psi_sup / (beta/beta_c - 1) * (k_n - 1)^{-(beta/beta_c - 1)/2}`.
pub fn bn_bound(k_n: usize, beta: f64, psi_sup: f64) -> Result<f64> {
    let r = check_supercritical(beta)?;
    if k_n < 2 {
        return Err(Error::domain(format!("k_n = {k_n}, need k_n >= 2")));
    }
    Ok(2.0 * psi_sup / (r - 1.0) * ((k_n - 1) as f64).powf(-(r - 1.0) / 2.0))
}

/// Total variation bound between the full Gibbs measure and its `k_n`-term
/// truncation: twice [`bn_bound`] at unit sup-norm.
pub fn tv_truncation_bound(k_n: usize, beta: f64) -> Result<f64> {
    Ok(2.0 * bn_bound(k_n, beta, 1.0)?)
}

/// Total variation distance `sum |mu_i - nu_i|` over the union of supports;
/// ranges over `[0, 2]`. Supports must index the same configuration universe.
pub fn tv(a: &DiscreteMeasure, b: &DiscreteMeasure) -> Result<f64> {
    for m in [a, b] {
        if (m.total() - 1.0).abs() > 1e-9 {
            return Err(Error::domain(format!(
                "measure not normalized (total = {})",
                m.total()
            )));
        }
    }
    let mut rest: HashMap<u64, f64> = b
        .support()
        .iter()
        .copied()
        .zip(b.weights().iter().copied())
        .collect();
    let mut d = 0.0;
    for (s, w) in a.support().iter().zip(a.weights()) {
        let bw = rest.remove(s).unwrap_or(0.0);
        d += (w - bw).abs();
    }
    Ok(d + rest.values().sum::<f64>())
}

/// Partial sum `zeta_k(beta) = sum_{j=2..k} exp(-(beta/beta_c) T_j)`.
#[derive(Debug, Clone, Copy)]
pub struct ZetaSeries {
    pub beta: f64,
    pub k: usize,
    pub partial: f64,
}

/// The partial `zeta` series on a given ladder; nondecreasing in `k` pathwise
/// and finite in expectation for `beta > beta_c`.
pub fn zeta_partial(ladder: &ExponentialLadder, beta: f64, k: usize) -> Result<ZetaSeries> {
    let r = check_supercritical(beta)?;
    if k < 2 {
        return Err(Error::domain(format!("k = {k}, need k >= 2")));
    }
    if ladder.len() < k {
        return Err(Error::domain(format!(
            "ladder length {} too short for k = {k}",
            ladder.len()
        )));
    }
    let partial = (2..=k).map(|j| (-r * ladder.weighted_sum(j)).exp()).sum();
    Ok(ZetaSeries { beta, k, partial })
}

/// Exact mean of the partial series,
/// `E[zeta_k] = sum_{j=2..k} prod_{l=1..j} (1 + (beta/beta_c)/l)^{-1}`,
/// plus, above criticality, the cruder majorant
/// `e^{(beta/beta_c)^2} * sum_{j>=2} j^{-beta/beta_c}`.
pub fn zeta_mean_exact(beta: f64, k: usize) -> Result<(f64, Option<f64>)> {
    if !(beta > 0.0) {
        return Err(Error::domain(format!("beta = {beta}, need beta > 0")));
    }
    if k < 2 {
        return Err(Error::domain(format!("k = {k}, need k >= 2")));
    }
    let r = beta / beta_c();
    let mut product = 1.0 / (1.0 + r);
    let mut sum = 0.0;
    for j in 2..=k {
        product /= 1.0 + r / j as f64;
        sum += product;
    }
    let crude = if r > 1.0 {
        Some((r * r).exp() * riemann_tail_from_two(r))
    } else {
        None
    };
    Ok((sum, crude))
}

/// `sum_{j>=2} j^{-r}` for `r > 1`, direct sum with an Euler-Maclaurin tail.
fn riemann_tail_from_two(r: f64) -> f64 {
    let m = 100_000u64;
    let head: f64 = (2..m).map(|j| (j as f64).powf(-r)).sum();
    let mf = m as f64;
    head + mf.powf(1.0 - r) / (r - 1.0) + 0.5 * mf.powf(-r) - r / 12.0 * mf.powf(-r - 1.0)
}

/// Conditional-increment identity of the `zeta` series: given the first `k`
/// ladder draws, the next term has conditional mean
/// `exp(-(beta/beta_c) T_k) / (1 + (beta/beta_c)/(k+1))`. Checked by frozen-
/// prefix Monte Carlo; the report holds iff the empirical mean sits within
/// 3 SE of the exact value.
pub fn supermartingale_check(beta: f64, k: usize, replicas: usize, seed: u64) -> Result<BoundReport> {
    if !(beta > 0.0) {
        return Err(Error::domain(format!("beta = {beta}, need beta > 0")));
    }
    if k < 1 || replicas < 2 {
        return Err(Error::domain("need k >= 1 and replicas >= 2"));
    }
    let r = beta / beta_c();
    let mut prefix_rng = lane_substream(seed, 0, 0);
    let prefix = ExponentialLadder::sample(k, &mut prefix_rng)?;
    let t_k = prefix.weighted_sum(k);
    let exact = (-r * t_k).exp() / (1.0 + r / (k + 1) as f64);
    let increments: Vec<f64> = (0..replicas as u64)
        .map(|i| {
            let mut rng = lane_substream(seed, 1, i);
            let w: f64 = Exp1.sample(&mut rng);
            (-r * (t_k + w / (k + 1) as f64)).exp()
        })
        .collect();
    let (mc, se) = mean_and_se(&increments);
    Ok(BoundReport::new(
        format!("zeta_conditional_increment(beta/beta_c={r:.3}, k={k})"),
        (mc - exact).abs(),
        se,
        0.0,
    ))
}

/// Pathwise lower bounds on how far the ladder measure is from degenerate
/// shapes, each paired with the directly computed distance on the same
/// ladder. `all_hold` is exact up to a 1e-12 rounding allowance (the
/// uniform-ladder case makes two of the inequalities exactly tight).
#[derive(Debug, Clone, Copy)]
pub struct PropertyBounds {
    /// Distance to the point mass at the minimizer >= phi_2/(1+phi_2) with
    /// `phi_2 = exp(-(beta/beta_c)(W_1 + W_2/2))`.
    pub point_mass_bound: f64,
    pub point_mass_tv: f64,
    /// Distance to the uniform measure on the same support >= w_max - 1/k_n.
    pub uniform_bound: f64,
    pub uniform_tv: f64,
    /// Distance between the k_0- and k_n-term measures >= the (k_0+1)-th
    /// raw weight over the k_n-term normalizer.
    pub truncation_bound: f64,
    pub truncation_tv: f64,
    /// Mass of the k_0 heaviest ranks <= 1 - truncation_bound.
    pub top_mass_cap: f64,
    pub top_mass: f64,
    pub all_hold: bool,
}

/// Evaluate the four pathwise inequalities on one ladder.
pub fn property_lower_bounds(
    ladder: &ExponentialLadder,
    beta: f64,
    k_n: usize,
    k_0: usize,
) -> Result<PropertyBounds> {
    let r = check_supercritical(beta)?;
    if k_0 == 0 || k_0 >= k_n {
        return Err(Error::domain(format!("k_0 = {k_0} outside 1..k_n = {k_n}")));
    }
    if ladder.len() < k_n {
        return Err(Error::domain(format!(
            "ladder length {} too short for k_n = {k_n}",
            ladder.len()
        )));
    }
    let m = mu2(ladder, beta, k_n)?;
    let w_max = m.weights()[0];
    // Normalizer of the raw (w_rank0 = 1) weights.
    let normalizer = 1.0 / w_max;

    let phi2 = (-r * ladder.weighted_sum(2)).exp();
    let point_mass_bound = phi2 / (1.0 + phi2);
    let point_mass_tv = tv(&m, &DiscreteMeasure::point_mass(m.support()[0]))?;

    let uniform_bound = w_max - 1.0 / k_n as f64;
    let uniform_tv = tv(&m, &DiscreteMeasure::uniform(m.support().to_vec()))?;

    let truncation_bound = (-r * ladder.weighted_sum(k_0 + 1)).exp() / normalizer;
    let truncation_tv = tv(&mu2(ladder, beta, k_0)?, &m)?;

    let top_mass_cap = 1.0 - truncation_bound;
    let top_mass = m.head_mass(k_0);

    let eps = 1e-12;
    let all_hold = point_mass_tv >= point_mass_bound - eps
        && uniform_tv >= uniform_bound - eps
        && truncation_tv >= truncation_bound - eps
        && top_mass <= top_mass_cap + eps;
    Ok(PropertyBounds {
        point_mass_bound,
        point_mass_tv,
        uniform_bound,
        uniform_tv,
        truncation_bound,
        truncation_tv,
        top_mass_cap,
        top_mass,
        all_hold,
    })
}
