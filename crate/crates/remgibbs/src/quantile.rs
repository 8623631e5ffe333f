//! The Gaussian upper-tail quantile map `G` and its building blocks.
//!
//! `G(u)` is the value whose upper-tail probability is `u`: `1 - Phi(G(u)) = u`.
//! Everything in the crate that converts uniform order statistics into Gaussian
//! order statistics goes through this module. The complementary CDF is computed
//! directly (never as `1 - Phi`), so it keeps full relative accuracy out to the
//! extreme tail; the exact inverse is a bracketed Newton iteration on it.

use crate::error::{Error, Result};
use std::f64::consts::{PI, SQRT_2};

/// Standard normal density.
pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal CDF `Phi(x)`, absolute error below 1e-15.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Upper tail `1 - Phi(x)` without cancellation: relative accuracy is kept
/// even where `Phi(x)` rounds to 1 (usable down to tail masses near the
/// smallest positive doubles, around `x = 38`).
pub fn std_normal_upper_tail(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

fn check_tail_probability(u: f64) -> Result<()> {
    if !u.is_finite() || u <= 0.0 || u >= 1.0 - 1e-16 {
        return Err(Error::domain(format!(
            "tail probability u = {u} outside (0, 1 - 1e-16)"
        )));
    }
    Ok(())
}

/// Exact inversion of the upper tail: returns `x` with
/// `|1 - Phi(x) - u| / u <= 1e-12`.
///
/// Accepts any `u` in `(0, 1 - 1e-16)`; full accuracy is guaranteed for
/// `u > 1e-300`, below that the result is limited by subnormal resolution of
/// `u` itself.
pub fn quantile_exact(u: f64) -> Result<f64> {
    check_tail_probability(u)?;
    if u == 0.5 {
        return Ok(0.0);
    }
    if u > 0.5 {
        // 1 - u is exact for u in (0.5, 1), so the reflected solve loses nothing.
        return Ok(-invert_upper_tail(1.0 - u));
    }
    Ok(invert_upper_tail(u))
}

/// Two-term tail expansion of `G`:
/// `sqrt(2 log(1/u)) - (log log(1/u) + log(4 pi)) / (2 sqrt(2 log(1/u)))`.
///
/// Valid for `u <= e^-e`, where the iterated logarithm is positive. The
/// remainder against [`quantile_exact`] is of order
/// `(log log(1/u))^2 / (log(1/u))^(3/2)`.
pub fn quantile_asymptotic(u: f64) -> Result<f64> {
    let max_u = (-std::f64::consts::E).exp();
    if !u.is_finite() || u <= 0.0 || u > max_u {
        return Err(Error::domain(format!(
            "tail probability u = {u} outside (0, e^-e] for the asymptotic expansion"
        )));
    }
    let l = -u.ln();
    let s = (2.0 * l).sqrt();
    Ok(s - (l.ln() + (4.0 * PI).ln()) / (2.0 * s))
}

/// Solve `1 - Phi(x) = u` for `u` in `(0, 0.5]` by safeguarded Newton.
fn invert_upper_tail(u: f64) -> f64 {
    if u == 0.5 {
        return 0.0;
    }
    // Bracket: 1 - Phi is strictly decreasing, 1 - Phi(0) = 0.5 >= u and
    // 1 - Phi(40) underflows to 0 < u.
    let mut lo = 0.0;
    let mut hi = 40.0;
    let mut x = initial_guess(u).clamp(lo, hi);
    for _ in 0..120 {
        let q = std_normal_upper_tail(x);
        let resid = q - u;
        if resid.abs() <= 1e-13 * u {
            break;
        }
        // q too large means x is left of the root.
        if resid > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x + resid / std_normal_pdf(x);
        x = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * (1.0 + x.abs()) {
            break;
        }
    }
    x
}

/// Acklam's rational approximation of the normal quantile, used only as the
/// Newton starting point (relative error around 1e-9).
fn initial_guess(u: f64) -> f64 {
    const A: [f64; 6] = [
        -39.696_830_286_653_8,
        220.946_098_424_521,
        -275.928_510_446_969,
        138.357_751_867_269,
        -30.664_798_066_147_2,
        2.506_628_277_459_24,
    ];
    const B: [f64; 5] = [
        -54.476_098_798_224_1,
        161.585_836_858_041,
        -155.698_979_859_887,
        66.801_311_887_719_7,
        -13.280_681_552_885_7,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_29e-3,
        -0.322_396_458_041_136,
        -2.400_758_277_161_84,
        -2.549_732_539_343_73,
        4.374_664_141_464_97,
        2.938_163_982_698_78,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_46e-3,
        0.322_467_129_070_04,
        2.445_134_137_143,
        3.754_408_661_907_42,
    ];
    // ppf(u) for the lower tail, negated to give the upper-tail quantile.
    let z = if u < 0.02425 {
        let q = (-2.0 * u.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = u - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    -z
}
