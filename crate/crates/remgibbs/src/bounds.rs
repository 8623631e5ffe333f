//! Analytic concentration and spacing bounds paired with Monte Carlo checks.
//!
//! Every check produces a [`BoundReport`]: the empirical probability (or
//! value), its standard error, the analytic bound, and the pass flag
//! `empirical <= bound + 3 se`. The bounds are one-sided and often loose;
//! the 3-SE allowance controls false alarms without masking real violations.
//!
//! Replica-parallel checks take a master seed and fan out one substream per
//! replica, so the reports are reproducible across thread counts.

use crate::error::{Error, Result};
use crate::order_stats::{gamma_large_shape, ExponentialLadder};
use crate::quantile::quantile_exact;
use crate::rng::run_replicas;
use crate::stats::binomial_se;
use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::Serialize;

/// Regime constants for the spacing bounds: `lambda_n = lambda log(n)/n^alpha`
/// must be a valid tail mass, and `lambda_tilde_n` inflates it by the
/// binomial fluctuation allowance.
#[derive(Debug, Clone, Copy)]
pub struct RegimeParams {
    pub n: u64,
    pub lambda: f64,
    pub alpha: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub gamma: f64,
    pub lambda_n: f64,
    pub lambda_tilde_n: f64,
}

/// Validate and derive the regime constants.
pub fn regime(n: u64, lambda: f64, alpha: f64, delta: f64, epsilon: f64, gamma: f64) -> Result<RegimeParams> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Regime(format!("lambda = {lambda} outside (0,1)")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Regime(format!("alpha = {alpha} outside (0,1)")));
    }
    if !(delta > 0.0) {
        return Err(Error::Regime(format!("delta = {delta}, need delta > 0")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Regime(format!("epsilon = {epsilon} outside (0,1)")));
    }
    if !(gamma > 0.0) {
        return Err(Error::Regime(format!("gamma = {gamma}, need gamma > 0")));
    }
    let nf = n as f64;
    let lambda_n = lambda * nf.ln() / nf.powf(alpha);
    if !(lambda_n < 1.0) {
        return Err(Error::Regime(format!(
            "lambda_n = {lambda_n} >= 1 at n = {n}: population too small for alpha = {alpha}"
        )));
    }
    let lambda_tilde_n =
        lambda_n * (1.0 + 2.0 * (2.0 * (1.0 - lambda_n) / (lambda * nf.powf((1.0 - alpha) / 2.0))).sqrt());
    Ok(RegimeParams {
        n,
        lambda,
        alpha,
        delta,
        epsilon,
        gamma,
        lambda_n,
        lambda_tilde_n,
    })
}

/// One row of the verification suite.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub empirical: f64,
    pub se: f64,
    pub bound: f64,
    pub holds: bool,
}

impl BoundReport {
    /// `holds` is exactly `empirical <= bound + 3 se`.
    pub fn new(name: impl Into<String>, empirical: f64, se: f64, bound: f64) -> Self {
        BoundReport {
            name: name.into(),
            empirical,
            se,
            bound,
            holds: empirical <= bound + 3.0 * se,
        }
    }
}

/// Width of the log-minimum window: `2 log((log n)^{1+delta})`.
fn minimum_window(n: f64, delta: f64) -> f64 {
    2.0 * ((n.ln()).powf(1.0 + delta)).ln()
}

/// Failure-probability bound for the log-minimum window:
/// `4 / (log n)^{1+delta}`.
pub fn minimum_window_bound(n: u64, delta: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::domain(format!("n = {n}, need n >= 3")));
    }
    if !(delta > 0.0) {
        return Err(Error::domain(format!("delta = {delta}, need delta > 0")));
    }
    Ok(4.0 / (n as f64).ln().powf(1.0 + delta))
}

/// Monte Carlo check that `|log(1/U_{1,n}) - log n| <= 2 log((log n)^{1+delta})`
/// fails with probability at most `4/(log n)^{1+delta}`. Each replica costs
/// O(1): the minimum is `W_1 / (W_1 + Gamma(n))`.
pub fn lemma21_check(n: u64, delta: f64, replicas: usize, seed: u64) -> Result<BoundReport> {
    let bound = minimum_window_bound(n, delta)?;
    let nf = n as f64;
    let window = minimum_window(nf, delta);
    let ln_n = nf.ln();
    let fails: u64 = run_replicas(seed, 1, replicas, |_, rng| {
        let w1: f64 = Exp1.sample(rng);
        let total = w1 + gamma_large_shape(nf, rng).expect("shape >= 1");
        let log_inv_u1 = (total / w1).ln();
        u64::from((log_inv_u1 - ln_n).abs() > window)
    })
    .into_iter()
    .sum();
    let p = fails as f64 / replicas as f64;
    Ok(BoundReport::new(
        format!("minimum_window(n=2^{:.0}, delta={delta})", nf.log2()),
        p,
        binomial_se(p, replicas),
        bound,
    ))
}

/// Exponential-Markov deviation bound for the ladder average:
/// `P[|S_n/n - 1| >= eps] <= 2 exp(-n eps^2 / 4)`.
pub fn ladder_deviation_bound(n: usize, eps: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("n = 0, need n >= 1"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain(format!("eps = {eps} outside (0,1)")));
    }
    Ok(2.0 * (-(n as f64) * eps * eps / 4.0).exp())
}

/// Monte Carlo companion of [`ladder_deviation_bound`].
pub fn ladder_deviation_check(n: usize, eps: f64, replicas: usize, seed: u64) -> Result<BoundReport> {
    let bound = ladder_deviation_bound(n, eps)?;
    let fails: u64 = run_replicas(seed, 2, replicas, |_, rng| {
        let s: f64 = (0..n).map(|_| -> f64 { Exp1.sample(rng) }).sum();
        u64::from((s / n as f64 - 1.0).abs() >= eps)
    })
    .into_iter()
    .sum();
    let p = fails as f64 / replicas as f64;
    Ok(BoundReport::new(
        format!("ladder_deviation(n={n}, eps={eps})"),
        p,
        binomial_se(p, replicas),
        bound,
    ))
}

/// Chernoff bound for the weighted exponential tail sum starting at `j0`:
/// `P[sum_{l>=j0} (W_l - 1)/l >= x] <= exp(-t x + (t^2/j0)(1 + 2 t^2/j0^2)(1 + 1/j0))`,
/// valid while `t^2/j0^2 <= 3/4`.
pub fn weighted_tail_bound(x: f64, t: f64, j0: u64) -> Result<f64> {
    if !(x > 0.0) || !(t > 0.0) || j0 == 0 {
        return Err(Error::domain(format!(
            "need x > 0, t > 0, j0 >= 1 (got x = {x}, t = {t}, j0 = {j0})"
        )));
    }
    let j0f = j0 as f64;
    if t * t / (j0f * j0f) > 0.75 {
        return Err(Error::domain(format!(
            "t^2/j0^2 = {} > 3/4: outside the bound's validity",
            t * t / (j0f * j0f)
        )));
    }
    Ok((-t * x + t * t / j0f * (1.0 + 2.0 * t * t / (j0f * j0f)) * (1.0 + 1.0 / j0f)).exp())
}

/// Monte Carlo companion of [`weighted_tail_bound`]: the series is truncated
/// at `truncation_factor * j0` terms; the discarded variance is at most
/// `1/(truncation_factor * j0)`.
pub fn weighted_tail_check(
    x: f64,
    t: f64,
    j0: u64,
    truncation_factor: u64,
    replicas: usize,
    seed: u64,
) -> Result<BoundReport> {
    let bound = weighted_tail_bound(x, t, j0)?;
    let last = j0 * truncation_factor;
    let fails: u64 = run_replicas(seed, 3, replicas, |_, rng| {
        let mut acc = 0.0;
        for l in j0..=last {
            let w: f64 = Exp1.sample(rng);
            acc += (w - 1.0) / l as f64;
        }
        u64::from(acc >= x)
    })
    .into_iter()
    .sum();
    let p = fails as f64 / replicas as f64;
    Ok(BoundReport::new(
        format!("weighted_tail(x={x}, t={t}, j0={j0})"),
        p,
        binomial_se(p, replicas),
        bound,
    ))
}

/// Two-sided tail bound for `Z = sum_{i>=1} (W_i - 1)/i`:
/// each tail is at most `exp(-x sqrt(3)/2 + 15/4)`.
pub fn z_tail_bound(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("x = {x}, need x > 0")));
    }
    Ok((-x * 3.0f64.sqrt() / 2.0 + 15.0 / 4.0).exp())
}

/// Monte Carlo check of both tails of `Z`, truncated at `truncation` terms
/// (discarded variance <= 1/truncation). Returns the upper- and lower-tail
/// reports; thresholds share one set of replicas.
pub fn z_tail_check(x: f64, replicas: usize, truncation: usize, seed: u64) -> Result<Vec<BoundReport>> {
    Ok(z_tail_reports(&[x], replicas, truncation, seed)?.remove(0))
}

/// Tail reports for several thresholds from one shared set of `Z` draws.
pub fn z_tail_reports(
    xs: &[f64],
    replicas: usize,
    truncation: usize,
    seed: u64,
) -> Result<Vec<Vec<BoundReport>>> {
    for &x in xs {
        z_tail_bound(x)?;
    }
    if truncation == 0 || replicas < 2 {
        return Err(Error::domain("need truncation >= 1 and replicas >= 2"));
    }
    let zs: Vec<f64> = run_replicas(seed, 4, replicas, |_, rng| {
        let mut acc = 0.0;
        for i in 1..=truncation {
            let w: f64 = Exp1.sample(rng);
            acc += (w - 1.0) / i as f64;
        }
        acc
    });
    Ok(xs
        .iter()
        .map(|&x| {
            let bound = z_tail_bound(x).expect("validated");
            let up = zs.iter().filter(|&&z| z >= x).count() as f64 / replicas as f64;
            let lo = zs.iter().filter(|&&z| z <= -x).count() as f64 / replicas as f64;
            vec![
                BoundReport::new(format!("z_tail_upper(x={x})"), up, binomial_se(up, replicas), bound),
                BoundReport::new(format!("z_tail_lower(x={x})"), lo, binomial_se(lo, replicas), bound),
            ]
        })
        .collect())
}

/// Bernstein's inequality for bounded centered summands:
/// `P[|sum Y_i| >= t sqrt(D_n)] <= 2 exp(-t^2/2)` for `0 < t < sqrt(D_n)`,
/// `D_n = sum E[Y_i^2]`.
pub fn bernstein_bound(variances: &[f64], t: f64) -> Result<f64> {
    if variances.is_empty() || variances.iter().any(|&v| !(v >= 0.0)) {
        return Err(Error::domain("variances must be nonempty and nonnegative"));
    }
    let d_n: f64 = variances.iter().sum();
    if !(t > 0.0 && t < d_n.sqrt()) {
        return Err(Error::domain(format!(
            "t = {t} outside (0, sqrt(D_n) = {})",
            d_n.sqrt()
        )));
    }
    Ok(2.0 * (-t * t / 2.0).exp())
}

/// Monte Carlo companion with centered Bernoulli(p) summands.
pub fn bernstein_check(p: f64, n: usize, t: f64, replicas: usize, seed: u64) -> Result<BoundReport> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("p = {p} outside (0,1)")));
    }
    let variances = vec![p * (1.0 - p); n];
    let bound = bernstein_bound(&variances, t)?;
    let threshold = t * (n as f64 * p * (1.0 - p)).sqrt();
    let fails: u64 = run_replicas(seed, 5, replicas, |_, rng| {
        let mut sum = 0.0;
        for _ in 0..n {
            let b: f64 = if rng.random::<f64>() < p { 1.0 } else { 0.0 };
            sum += b - p;
        }
        u64::from(sum.abs() >= threshold)
    })
    .into_iter()
    .sum();
    let freq = fails as f64 / replicas as f64;
    Ok(BoundReport::new(
        format!("bernstein(p={p}, n={n}, t={t})"),
        freq,
        binomial_se(freq, replicas),
        bound,
    ))
}

/// Failure-probability bound of the spacing event:
/// `4 (1/(log n)^{1+delta} + e^{-k_n/16}/(1 - e^{-1/16}))`.
pub fn spacing_event_bound(n: u64, delta: f64, k_n: usize) -> Result<f64> {
    let first = minimum_window_bound(n, delta)?;
    if k_n == 0 {
        return Err(Error::domain("k_n = 0, need k_n >= 1"));
    }
    let second = (-(k_n as f64) / 16.0).exp() / (1.0 - (-1.0f64 / 16.0).exp());
    Ok(first + 4.0 * second)
}

/// Per-replica state of the spacing check.
struct SpacingReplica {
    violated: bool,
    omega: bool,
}

/// Lower bounds on the rescaled Gaussian spacings
/// `sqrt(2 log n) (X_{j,n} - X_{1,n})`:
///
/// * for `k_n <= j <= n lambda_tilde_n`:
///   `2 log n (1 - sqrt(1 - log j / log n)) (1 - eps)`;
/// * for `j` above `n lambda_tilde_n` (checked at the window edge and at
///   `j = n`): `2 log n sqrt(1 - eps) - G(lambda_n) sqrt(2 log n)`.
///
/// The replica simulates the exact joint law through the exponential ladder
/// and the Gamma bridge, evaluates every `j` in the window, and reports the
/// fraction of replicas with any violation against [`spacing_event_bound`].
/// On replicas where the good event holds (the log-minimum window plus all
/// ladder averages within 1/2) no violation is expected at all.
pub fn prop22_check(
    params: &RegimeParams,
    k_n: usize,
    eps: f64,
    replicas: usize,
    seed: u64,
) -> Result<BoundReport> {
    spacing_check_impl(params, k_n, eps, replicas, seed, false).map(|(report, _)| report)
}

/// As [`prop22_check`], additionally returning the fraction of replicas
/// where the good event held and a violation occurred anyway (the literal
/// "on the event" form of the statement; expected to be zero).
pub fn prop22_check_with_event(
    params: &RegimeParams,
    k_n: usize,
    eps: f64,
    replicas: usize,
    seed: u64,
) -> Result<(BoundReport, f64)> {
    spacing_check_impl(params, k_n, eps, replicas, seed, true)
}

fn spacing_check_impl(
    params: &RegimeParams,
    k_n: usize,
    eps: f64,
    replicas: usize,
    seed: u64,
    want_event: bool,
) -> Result<(BoundReport, f64)> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain(format!("eps = {eps} outside (0,1)")));
    }
    let n = params.n;
    let window_top = (n as f64 * params.lambda_tilde_n).ceil() as u64;
    if (k_n as u64) >= window_top {
        return Err(Error::domain(format!(
            "k_n = {k_n} not below n*lambda_tilde_n = {window_top}"
        )));
    }
    const WINDOW_CAP: u64 = 400_000;
    let top = window_top.min(WINDOW_CAP) as usize;
    let bound = spacing_event_bound(n, params.delta, k_n)?;
    let nf = n as f64;
    let ln_n = nf.ln();
    let sqrt_2ln = (2.0 * ln_n).sqrt();
    let window = minimum_window(nf, params.delta);
    let g_lambda = quantile_exact(params.lambda_n)?;
    let edge_floor = 2.0 * ln_n * (1.0 - eps).sqrt() - g_lambda * sqrt_2ln;

    let results: Vec<SpacingReplica> = run_replicas(seed, 6, replicas, |_, rng| {
        let ladder = ExponentialLadder::sample(top, rng).expect("top >= 1");
        // Bridge to S_n, then one more draw for S_{n+1}.
        let s_n = ladder.partial_sum(top) + gamma_large_shape((n - top as u64) as f64, rng).expect("shape >= 1");
        let w_last: f64 = Exp1.sample(rng);
        let s_n1 = s_n + w_last;

        let u1 = ladder.partial_sum(1) / s_n1;
        let log_inv_u1 = -u1.ln();
        let mut omega = (log_inv_u1 - ln_n).abs() <= window;
        let g1 = quantile_exact(u1).expect("u1 in (0,1)");

        let mut violated = false;
        for j in k_n..=top {
            let sj = ladder.partial_sum(j);
            if omega && (sj / j as f64 - 1.0).abs() >= 0.5 {
                omega = false;
            }
            let u_j = sj / s_n1;
            let lhs = sqrt_2ln * (g1 - quantile_exact(u_j).expect("u_j in (0,1)"));
            let rhs = 2.0 * ln_n * (1.0 - (1.0 - (j as f64).ln() / ln_n).sqrt()) * (1.0 - eps);
            if lhs < rhs {
                violated = true;
            }
        }
        // Above the window: the bound is constant in j; check the edge and
        // j = n (the largest uniform via its exact complement).
        let u_top = ladder.partial_sum(top) / s_n1;
        let lhs_top = sqrt_2ln * (g1 - quantile_exact(u_top).expect("in range"));
        let tail_n = w_last / s_n1;
        let g_n = -quantile_exact(tail_n).expect("in range");
        let lhs_n = sqrt_2ln * (g1 - g_n);
        if lhs_top < edge_floor || lhs_n < edge_floor {
            violated = true;
        }
        SpacingReplica { violated, omega }
    });

    let fails = results.iter().filter(|r| r.violated).count();
    let p = fails as f64 / replicas as f64;
    let on_event_violations = if want_event {
        results.iter().filter(|r| r.omega && r.violated).count() as f64 / replicas as f64
    } else {
        0.0
    };
    let report = BoundReport::new(
        format!(
            "spacing_lower(n=2^{:.0}, k_n={k_n}, eps={eps}, delta={})",
            nf.log2(),
            params.delta
        ),
        p,
        binomial_se(p, replicas),
        bound,
    );
    Ok((report, on_event_violations))
}

/// Refined bound value `2 exp(-(sqrt(3)/2) (log k_n)^eta)` for the
/// small-`j` spacing window.
pub fn refined_spacing_bound(k_n: usize, eta: f64) -> Result<f64> {
    if k_n < 2 {
        return Err(Error::domain(format!("k_n = {k_n}, need k_n >= 2")));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::domain(format!("eta = {eta} outside (0,1)")));
    }
    Ok(2.0 * (-(3.0f64.sqrt() / 2.0) * (k_n as f64).ln().powf(eta)).exp())
}

/// Refined spacing check on the window `k_n <= j <= min(n^0.35, n lambda_n)`
/// where `log j / log n` stays small:
/// `sqrt(2 log n)(X_{j,n} - X_{1,n}) >= log j (1 - (log j)^{eta - 1})`.
/// The violation probability is compared against [`refined_spacing_bound`]
/// plus a `1/sqrt(k_n)` residual-event allowance.
pub fn refined_spacing_check(
    n: u64,
    k_n: usize,
    eta: f64,
    replicas: usize,
    seed: u64,
) -> Result<BoundReport> {
    let bound = refined_spacing_bound(k_n, eta)? + 1.0 / (k_n as f64).sqrt();
    let nf = n as f64;
    let lambda_window = 0.5 * nf.ln() / nf.powf(0.25) * nf; // n * lambda_n at the default regime
    let top = (nf.powf(0.35).floor().min(lambda_window) as u64).min(2_000_000) as usize;
    if top < k_n {
        return Err(Error::domain(format!(
            "window empty: k_n = {k_n} above n^0.35 = {top}"
        )));
    }
    let ln_n = nf.ln();
    let sqrt_2ln = (2.0 * ln_n).sqrt();
    let fails: u64 = run_replicas(seed, 7, replicas, |_, rng| {
        let ladder = ExponentialLadder::sample(top, rng).expect("top >= 1");
        let s_n1 = ladder.partial_sum(top) + gamma_large_shape((n + 1 - top as u64) as f64, rng).expect("shape");
        let g1 = quantile_exact(ladder.partial_sum(1) / s_n1).expect("in range");
        for j in k_n..=top {
            let lhs = sqrt_2ln * (g1 - quantile_exact(ladder.partial_sum(j) / s_n1).expect("in range"));
            let lj = (j as f64).ln();
            let rhs = lj * (1.0 - lj.powf(eta - 1.0));
            if lhs < rhs {
                return 1u64;
            }
        }
        0u64
    })
    .into_iter()
    .sum();
    let p = fails as f64 / replicas as f64;
    Ok(BoundReport::new(
        format!("refined_spacing(n=2^{:.0}, k_n={k_n}, eta={eta})", nf.log2()),
        p,
        binomial_se(p, replicas),
        bound,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn regime_example_values() {
        // lambda = 0.5, alpha = 0.25, n = 2^20.
        let r = regime(1 << 20, 0.5, 0.25, 1.0, 0.3, 1.0).unwrap();
        assert!(close(r.lambda_n, 0.2166084939249829, 1e-12), "{}", r.lambda_n);
        assert!(close(r.lambda_tilde_n, 0.2736068617352762, 1e-12), "{}", r.lambda_tilde_n);
    }

    #[test]
    fn regime_rejects_unit_tail_mass() {
        // alpha = 0.1 at n = 2^20 gives lambda_n ~ 1.73.
        assert!(matches!(
            regime(1 << 20, 0.5, 0.1, 1.0, 0.3, 1.0),
            Err(Error::Regime(_))
        ));
        assert!(regime(1 << 20, 0.5, 0.25, 0.0, 0.3, 1.0).is_err());
        assert!(regime(1 << 20, 1.5, 0.25, 1.0, 0.3, 1.0).is_err());
    }

    #[test]
    fn report_holds_rule_is_exact() {
        let r = BoundReport::new("x", 0.10, 0.01, 0.07);
        assert!(r.holds); // 0.10 <= 0.07 + 0.03
        let r = BoundReport::new("x", 0.101, 0.01, 0.07);
        assert!(!r.holds);
    }

    #[test]
    fn minimum_window_bound_values() {
        // 4/(log n)^{1+delta}: 0.0208… at n = 2^20, 0.0052… at n = 2^40.
        let b20 = minimum_window_bound(1 << 20, 1.0).unwrap();
        assert!(close(b20, 0.02081368981005608, 1e-15), "{b20}");
        let b40 = minimum_window_bound(1 << 40, 1.0).unwrap();
        assert!(close(b40, 0.00520342245251402, 1e-15), "{b40}");
        assert!(b40 < b20);
        assert!(minimum_window_bound(1 << 20, 2.0).unwrap() < b20);
        assert!(minimum_window_bound(1 << 20, 0.0).is_err());
        assert!(minimum_window_bound(2, 1.0).is_err());
    }

    #[test]
    fn lemma21_monte_carlo_holds() {
        let rep = lemma21_check(1 << 20, 1.0, 50_000, 42).unwrap();
        assert!(rep.holds, "{rep:?}");
        let rep40 = lemma21_check(1 << 40, 1.0, 50_000, 42).unwrap();
        assert!(rep40.holds, "{rep40:?}");
        assert!(rep40.bound < rep.bound);
    }

    #[test]
    fn ladder_bound_values() {
        // n = 16, eps = 1/2: 2 e^{-1}.
        let b = ladder_deviation_bound(16, 0.5).unwrap();
        assert!(close(b, 2.0 * (-1.0f64).exp(), 1e-15));
        let b400 = ladder_deviation_bound(400, 0.5).unwrap();
        assert!(close(b400, 2.0 * (-25.0f64).exp(), 1e-24));
        assert!(ladder_deviation_bound(0, 0.5).is_err());
        assert!(ladder_deviation_bound(16, 1.5).is_err());
    }

    #[test]
    fn ladder_monte_carlo_holds() {
        let rep = ladder_deviation_check(16, 0.5, 100_000, 42).unwrap();
        assert!(rep.holds, "{rep:?}");
        // n = 400: the bound is 2e-25, failures must be zero.
        let rep = ladder_deviation_check(400, 0.5, 100_000, 42).unwrap();
        assert_eq!(rep.empirical, 0.0);
        assert!(rep.holds);
    }

    #[test]
    fn weighted_tail_bound_values() {
        // j0 = 1 reduces to exp(-t x + 2 t^2 (1 + 2 t^2)).
        let b = weighted_tail_bound(1.0, 0.5, 1).unwrap();
        assert!(close(b, (0.25f64).exp(), 1e-15), "{b}");
        for (x, t) in [(0.7, 0.3), (2.0, 0.8), (1.3, 0.6)] {
            let generic = weighted_tail_bound(x, t, 1).unwrap();
            let reduced = (-t * x + 2.0 * t * t * (1.0 + 2.0 * t * t)).exp();
            assert!(close(generic, reduced, 1e-15));
        }
        assert!(weighted_tail_bound(1.0, 1.0, 1).is_err()); // t^2/j0^2 = 1 > 3/4
        assert!(weighted_tail_bound(-1.0, 0.5, 1).is_err());
    }

    #[test]
    fn weighted_tail_monte_carlo_holds() {
        let rep = weighted_tail_check(2.0, 0.8, 2, 10_000, 4000, 42).unwrap();
        assert!(rep.holds, "{rep:?}");
    }

    #[test]
    fn z_tail_bound_values() {
        let b5 = z_tail_bound(5.0).unwrap();
        assert!(close(b5, 0.5598272533947981, 1e-12), "{b5}");
        let b10 = z_tail_bound(10.0).unwrap();
        assert!(close(b10, 0.007370615678197013, 1e-14), "{b10}");
        assert!(z_tail_bound(0.0).is_err());
    }

    #[test]
    fn z_tail_monte_carlo_holds() {
        let reports = z_tail_check(5.0, 400, 100_000, 42).unwrap();
        for r in &reports {
            assert!(r.holds, "{r:?}");
        }
    }

    #[test]
    fn bernstein_values_and_limits() {
        let b = bernstein_bound(&vec![0.21; 10_000], 2.0).unwrap();
        assert!(close(b, 2.0 * (-2.0f64).exp(), 1e-15));
        // t -> 0+ makes the bound approach the vacuous 2.
        let b = bernstein_bound(&vec![0.25; 100], 1e-9).unwrap();
        assert!(close(b, 2.0, 1e-9));
        // t >= sqrt(D_n) rejected.
        assert!(bernstein_bound(&vec![0.25; 4], 1.1).is_err());
        assert!(bernstein_bound(&[], 0.5).is_err());
    }

    #[test]
    fn bernstein_monte_carlo_holds() {
        let rep = bernstein_check(0.3, 10_000, 3.0, 4000, 42).unwrap();
        assert!(rep.holds, "{rep:?}");
        // Gaussian truth ~ 0.0027 is far below 2e^{-4.5} ~ 0.022.
        assert!(rep.empirical < rep.bound);
    }

    #[test]
    fn spacing_event_bound_value() {
        // n = 2^20, delta = 1, k_n = 320.
        let b = spacing_event_bound(1 << 20, 1.0, 320).unwrap();
        assert!(close(b, 0.020813825889133067, 1e-12), "{b}");
    }

    #[test]
    fn spacing_floor_cancellation_at_quarter_alpha() {
        // At alpha = 1/4 the window floor 2(1 - sqrt(alpha))(1 - eps) log n
        // collapses to (1 - eps) log n.
        let alpha: f64 = 0.25;
        let eps = 0.3;
        let ln_n = (2.0f64).powi(20).ln();
        let floor = 2.0 * (1.0 - alpha.sqrt()) * (1.0 - eps) * ln_n;
        assert!(close(floor, (1.0 - eps) * ln_n, 1e-12));
    }

    #[test]
    fn prop22_small_population_probability_holds() {
        // n = 2^16 sits below the n_0 threshold of the statement: rare
        // violations occur even on the good event, but the probability rule
        // still holds against the (vacuous at this k_n) bound.
        let params = regime(1 << 16, 0.5, 0.25, 1.0, 0.3, 1.0).unwrap();
        let rep = prop22_check(&params, 45, 0.3, 150, 42).unwrap();
        assert!(rep.holds, "{rep:?}");
    }

    #[test]
    fn prop22_no_violation_on_good_event_at_default_grid() {
        // At n = 2^20 the implication is literal: replicas with the good
        // event on never violate the spacing floor.
        let params = regime(1 << 20, 0.5, 0.25, 1.0, 0.3, 1.0).unwrap();
        let (rep, on_event) = prop22_check_with_event(&params, 320, 0.3, 150, 42).unwrap();
        assert!(rep.holds, "{rep:?}");
        assert_eq!(on_event, 0.0, "violation with the good event on");
    }

    #[test]
    fn prop22_rejects_bad_window() {
        let params = regime(1 << 16, 0.5, 0.25, 1.0, 0.3, 1.0).unwrap();
        assert!(prop22_check(&params, 1 << 16, 0.3, 10, 42).is_err());
    }

    #[test]
    fn refined_bound_values() {
        // k_n = e^10, eta = 1/2: 2 exp(-(sqrt 3/2) sqrt(10)).
        let k = (10.0f64).exp().round() as usize;
        let b = refined_spacing_bound(k, 0.5).unwrap();
        assert!((b - 0.1293).abs() < 2e-4, "{b}");
        // eta -> 1 gives 2 k_n^{-sqrt(3)/2}.
        let b = refined_spacing_bound(1000, 0.999999).unwrap();
        let want = 2.0 * (1000.0f64).powf(-(3.0f64).sqrt() / 2.0);
        assert!((b / want - 1.0).abs() < 1e-4);
        assert!(refined_spacing_bound(1000, 1.0).is_err());
        assert!(refined_spacing_bound(1, 0.5).is_err());
    }

    #[test]
    fn refined_check_window_guard() {
        // k_n above n^0.35 leaves no j to test.
        assert!(refined_spacing_check(1 << 20, 200, 0.5, 10, 42).is_err());
    }

    #[test]
    fn refined_check_holds_at_2_pow_30() {
        let rep = refined_spacing_check(1 << 30, 1000, 0.5, 200, 42).unwrap();
        assert!(rep.holds, "{rep:?}");
    }
}
