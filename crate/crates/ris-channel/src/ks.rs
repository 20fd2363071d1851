//! Kolmogorov-Smirnov distances and large-sample critical values, used by
//! the simulation layer to compare empirical distributions against each
//! other and against analytic laws.

use crate::error::{Error, Result};

/// One-sample KS statistic: sup_x |F_n(x) - F(x)| for the empirical CDF of
/// `samples` against the reference CDF `cdf` (which must be a proper,
/// nondecreasing CDF on the sample range).
pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Config("KS statistic needs a non-empty sample".into()));
    }
    let mut sorted = samples.to_vec();
    if sorted.iter().any(|x| x.is_nan()) {
        return Err(Error::Config("KS sample contains NaN".into()));
    }
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN after check"));
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        let below = f - i as f64 / n;
        let above = (i + 1) as f64 / n - f;
        d = d.max(below).max(above);
    }
    Ok(d)
}

/// Two-sample KS statistic: sup_x |F_n(x) - G_m(x)| between the empirical
/// CDFs of `a` and `b`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Config("KS statistic needs non-empty samples".into()));
    }
    if a.iter().chain(b.iter()).any(|x| x.is_nan()) {
        return Err(Error::Config("KS sample contains NaN".into()));
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(|x, y| x.partial_cmp(y).expect("no NaN after check"));
    sb.sort_by(|x, y| x.partial_cmp(y).expect("no NaN after check"));
    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < sa.len() && j < sb.len() {
        // Advance past ties together so both CDFs are evaluated after the
        // full jump.
        let x = sa[i].min(sb[j]);
        while i < sa.len() && sa[i] <= x {
            i += 1;
        }
        while j < sb.len() && sb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Asymptotic rejection coefficient c(alpha) = sqrt(-ln(alpha / 2) / 2);
/// c(0.05) = 1.358, c(0.01) = 1.628.
pub fn ks_coefficient(alpha: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&alpha) || alpha == 0.0 {
        return Err(Error::Config(format!(
            "KS level must lie in (0, 1), got {alpha}"
        )));
    }
    Ok((-(alpha / 2.0).ln() / 2.0).sqrt())
}

/// Large-sample one-sample critical value at level `alpha` for `n` samples.
pub fn ks_critical_one_sample(alpha: f64, n: usize) -> Result<f64> {
    Ok(ks_coefficient(alpha)? / (n as f64).sqrt())
}

/// Large-sample two-sample critical value at level `alpha`.
pub fn ks_critical_two_sample(alpha: f64, n: usize, m: usize) -> Result<f64> {
    let (n, m) = (n as f64, m as f64);
    Ok(ks_coefficient(alpha)? * ((n + m) / (n * m)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_sample_against_exact_uniform_grid() {
        // Midpoint grid i/n + 1/(2n) has D = 1/(2n) against U(0, 1).
        let n = 100;
        let samples: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_one_sample(&samples, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(
            (d - 0.5 / n as f64).abs() < 1e-12,
            "grid KS distance = {d}, want {}",
            0.5 / n as f64
        );
    }

    #[test]
    fn two_sample_identical_and_disjoint() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(ks_two_sample(&a, &a).unwrap(), 0.0);
        let b = [10.0, 11.0, 12.0];
        assert_eq!(ks_two_sample(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn two_sample_handles_ties_across_samples() {
        let a = [0.0, 1.0, 1.0, 2.0];
        let b = [1.0, 1.0, 1.0, 3.0];
        // After x = 1: F_a = 3/4, F_b = 3/4; at x = 2: 4/4 vs 3/4.
        let d = ks_two_sample(&a, &b).unwrap();
        assert!((d - 0.25).abs() < 1e-15, "tied-sample KS = {d}");
    }

    #[test]
    fn critical_values_match_tabulated_coefficients() {
        assert!((ks_coefficient(0.05).unwrap() - 1.358).abs() < 1e-3);
        assert!((ks_coefficient(0.01).unwrap() - 1.628).abs() < 1e-3);
        let c = ks_critical_two_sample(0.01, 2000, 8000).unwrap();
        let want = 1.627_624 * (10000f64 / 16_000_000f64).sqrt();
        assert!((c - want).abs() < 1e-6, "two-sample critical = {c}");
    }
}
