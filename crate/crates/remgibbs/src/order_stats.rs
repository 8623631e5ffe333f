//! Exact simulation of uniform extreme order statistics in `O(k)` work.
//!
//! The Renyi representation writes the order statistics of `n` uniforms as
//! ratios of exponential partial sums, `U_{i,n} = S_i / S_{n+1}`, and the
//! Malmquist ratios `(U_{i,n}/U_{i+1,n})^i` are again i.i.d. uniform. Only the
//! first `k` partial sums are ever materialized; the gap `S_{n+1} - S_k` is a
//! single Gamma(n+1-k) draw, so populations up to `2^63` cost the same as
//! `k` draws.

use crate::error::{Error, Result};
use crate::quantile::quantile_exact;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

/// I.i.d. standard exponentials `W_i` together with their partial sums
/// `S_m = W_1 + ... + W_m` and the weighted sums `T_j = sum_{i<=j} W_i / i`.
#[derive(Debug, Clone)]
pub struct ExponentialLadder {
    w: Vec<f64>,
    s: Vec<f64>,
    t: Vec<f64>,
}

impl ExponentialLadder {
    /// Draw a ladder of `k >= 1` exponentials.
    pub fn sample(k: usize, rng: &mut impl Rng) -> Result<Self> {
        if k == 0 {
            return Err(Error::domain("ladder length k = 0, need k >= 1"));
        }
        let w: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
        Ok(Self::from_draws_unchecked(w))
    }

    /// Build a ladder from given nonnegative draws. Sampled ladders are
    /// almost surely strictly positive; zeros are allowed here so degenerate
    /// ladders (all spacings collapsed) can be constructed in tests.
    pub fn from_draws(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::domain("ladder draws empty, need k >= 1"));
        }
        if w.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(Error::domain("ladder draws must be finite and >= 0"));
        }
        Ok(Self::from_draws_unchecked(w))
    }

    fn from_draws_unchecked(w: Vec<f64>) -> Self {
        let k = w.len();
        let mut s = Vec::with_capacity(k + 1);
        let mut t = Vec::with_capacity(k + 1);
        s.push(0.0);
        t.push(0.0);
        for (i, &wi) in w.iter().enumerate() {
            s.push(s[i] + wi);
            t.push(t[i] + wi / (i + 1) as f64);
        }
        ExponentialLadder { w, s, t }
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// `W_i`, 1-based.
    pub fn draw(&self, i: usize) -> f64 {
        self.w[i - 1]
    }

    pub fn draws(&self) -> &[f64] {
        &self.w
    }

    /// `S_m`, defined for `m` in `0..=len`, with `S_0 = 0`.
    pub fn partial_sum(&self, m: usize) -> f64 {
        self.s[m]
    }

    /// `T_j = sum_{i<=j} W_i / i`, defined for `j` in `0..=len`, with `T_0 = 0`.
    pub fn weighted_sum(&self, j: usize) -> f64 {
        self.t[j]
    }
}

/// Free-function form of [`ExponentialLadder::sample`].
pub fn sample_ladder(k: usize, rng: &mut impl Rng) -> Result<ExponentialLadder> {
    ExponentialLadder::sample(k, rng)
}

/// Exact Gamma(shape, 1) draw for `shape >= 1` by the Marsaglia-Tsang
/// cubed-normal rejection method.
///
/// The log-acceptance term `d * (1 - v + ln v)` is expanded through `ln_1p`
/// so it stays accurate when `shape` is huge (the naive form loses all
/// precision beyond shape ~ 1e15); shapes up to `2^63` stay exact to f64
/// resolution of the result.
pub fn gamma_large_shape(shape: f64, rng: &mut impl Rng) -> Result<f64> {
    if !(shape >= 1.0) || !shape.is_finite() {
        return Err(Error::domain(format!("gamma shape = {shape}, need shape >= 1")));
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x: f64 = StandardNormal.sample(rng);
        let w = c * x;
        if w <= -1.0 {
            continue;
        }
        let t = 1.0 + w;
        let v = t * t * t;
        let u: f64 = rng.random();
        if u < 1.0 - 0.0331 * x * x * x * x {
            return Ok(d * v);
        }
        // d*(1 - v + ln v) with v = (1+w)^3, grouped so each term is
        // individually well conditioned for |w| ~ 1/sqrt(9d).
        let g = 3.0 * (w.ln_1p() - w) - 3.0 * w * w - w * w * w;
        if u.ln() < 0.5 * x * x + d * g {
            return Ok(d * v);
        }
    }
}

/// The `k` smallest order statistics of `n` virtual uniforms.
#[derive(Debug, Clone)]
pub struct OrderStatSample {
    n: u64,
    u: Vec<f64>,
}

impl OrderStatSample {
    pub fn population(&self) -> u64 {
        self.n
    }

    pub fn retained(&self) -> usize {
        self.u.len()
    }

    /// `U_{j,n}`, 1-based, `j <= k`.
    pub fn order_stat(&self, j: usize) -> f64 {
        self.u[j - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.u
    }

    #[cfg(test)]
    pub(crate) fn from_values(n: u64, u: Vec<f64>) -> Self {
        OrderStatSample { n, u }
    }
}

/// Joint draw of `(U_{1,n}, ..., U_{k,n})` in `O(k)` time: the first `k`
/// exponential partial sums divided by `S_{n+1} = S_k + Gamma(n+1-k)`.
pub fn topk_uniform(n: u64, k: usize, rng: &mut impl Rng) -> Result<OrderStatSample> {
    if k == 0 || k as u64 > n {
        return Err(Error::domain(format!(
            "retained count k = {k} outside 1..=n (population n = {n})"
        )));
    }
    let ladder = ExponentialLadder::sample(k, rng)?;
    let total = renyi_total(&ladder, n, k, rng)?;
    let u = ladder.s[1..=k].iter().map(|&si| si / total).collect();
    Ok(OrderStatSample { n, u })
}

/// `S_{n+1}` given the first `k` ladder sums: `S_k` plus one Gamma(n+1-k)
/// bridge draw (an Exp(1) when k = n).
pub(crate) fn renyi_total(
    ladder: &ExponentialLadder,
    n: u64,
    k: usize,
    rng: &mut impl Rng,
) -> Result<f64> {
    debug_assert!(k <= ladder.len());
    let gap_shape = (n - k as u64) as f64 + 1.0;
    Ok(ladder.partial_sum(k) + gamma_large_shape(gap_shape, rng)?)
}

/// `log(U_{1,n} / U_{j,n})` realized from the ladder: `-T_{j-1}`.
pub fn log_ratio_sum(ladder: &ExponentialLadder, j: usize) -> Result<f64> {
    if j < 2 || j > ladder.len() {
        return Err(Error::domain(format!(
            "index j = {j} outside 2..=k (ladder length {})",
            ladder.len()
        )));
    }
    Ok(-ladder.weighted_sum(j - 1))
}

/// Gaussian spacing `G(U_{1,n}) - G(U_{j,n})`, equal in law to
/// `X_{j,n} - X_{1,n}` by the symmetry of the Gaussian.
pub fn gaussian_spacing(sample: &OrderStatSample, j: usize) -> Result<f64> {
    if j < 2 || j > sample.retained() {
        return Err(Error::domain(format!(
            "index j = {j} outside 2..=k (retained {})",
            sample.retained()
        )));
    }
    let g1 = quantile_exact(sample.order_stat(1))?;
    let gj = quantile_exact(sample.order_stat(j))?;
    Ok(g1 - gj)
}
