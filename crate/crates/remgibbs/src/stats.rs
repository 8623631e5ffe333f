//! Small statistical toolbox shared by the verification suites: empirical
//! moments, Kolmogorov-Smirnov statistics and binomial standard errors.

/// Mean and standard error of the mean.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    assert!(n >= 2.0, "need at least two observations");
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Unbiased sample variance.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    assert!(n >= 2.0);
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
}

/// Standard error of an empirical probability `p_hat` over `n` trials.
pub fn binomial_se(p_hat: f64, n: usize) -> f64 {
    (p_hat * (1.0 - p_hat) / n as f64).sqrt()
}

/// Median; sorts a copy.
pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    assert!(n > 0);
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Pearson correlation coefficient.
pub fn pearson_correlation(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        let dx = x - ma;
        let dy = y - mb;
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    sab / (saa * sbb).sqrt()
}

/// Two-sample Kolmogorov-Smirnov statistic: the sup-distance between the two
/// empirical CDFs. Inputs need not be sorted.
pub fn two_sample_ks(sample_a: &[f64], sample_b: &[f64]) -> f64 {
    assert!(!sample_a.is_empty() && !sample_b.is_empty());
    let mut a = sample_a.to_vec();
    let mut b = sample_b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);

    let (na, nb) = (a.len(), b.len());
    let mut stat: f64 = 0.0;
    let (mut ia, mut ib) = (0usize, 0usize);
    while ia < na && ib < nb {
        let x = a[ia].min(b[ib]);
        while ia < na && a[ia] <= x {
            ia += 1;
        }
        while ib < nb && b[ib] <= x {
            ib += 1;
        }
        let diff = (ia as f64 / na as f64 - ib as f64 / nb as f64).abs();
        if diff > stat {
            stat = diff;
        }
    }
    stat
}

/// One-sample KS statistic of `xs` against the CDF `f`.
pub fn one_sample_ks<F: Fn(f64) -> f64>(xs: &[f64], f: F) -> f64 {
    assert!(!xs.is_empty());
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut stat: f64 = 0.0;
    for (i, x) in v.iter().enumerate() {
        let c = f(*x);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        stat = stat.max((c - lo).abs()).max((hi - c).abs());
    }
    stat
}

/// Asymptotic two-sample KS critical value at level `alpha`.
pub fn ks_two_sample_critical(alpha: f64, n: usize, m: usize) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

/// Asymptotic one-sample KS critical value at level `alpha`.
pub fn ks_one_sample_critical(alpha: f64, n: usize) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

/// Pearson chi-squared statistic for observed counts against expected counts.
pub fn chi2_statistic(observed: &[u64], expected: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected.len());
    observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_identical_samples_is_zero() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(two_sample_ks(&a, &a), 0.0);
    }

    #[test]
    fn ks_disjoint_samples_is_one() {
        let a = [1.0, 2.0];
        let b = [5.0, 6.0];
        assert_eq!(two_sample_ks(&a, &b), 1.0);
    }

    #[test]
    fn ks_handles_ties_across_samples() {
        let a = [0.0, 1.0];
        let b = [0.0, 1.0];
        assert_eq!(two_sample_ks(&a, &b), 0.0);
    }

    #[test]
    fn one_sample_ks_uniform() {
        // Evenly spaced points have KS = 1/(2n) against U(0,1).
        let xs: Vec<f64> = (0..10).map(|i| (i as f64 + 0.5) / 10.0).collect();
        let stat = one_sample_ks(&xs, |x| x.clamp(0.0, 1.0));
        assert!((stat - 0.05).abs() < 1e-12, "stat = {stat}");
    }

    #[test]
    fn moments_of_constant_shifted_sequence() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        let (m, se) = mean_and_se(&xs);
        assert!((m - 3.0).abs() < 1e-15);
        assert!((se - (2.5f64 / 5.0).sqrt()).abs() < 1e-15);
        assert_eq!(median(&xs), 3.0);
    }

    #[test]
    fn correlation_of_identical_series_is_one() {
        let a = [1.0, 2.0, 3.0, 5.0];
        assert!((pearson_correlation(&a, &a) - 1.0).abs() < 1e-12);
    }
}
