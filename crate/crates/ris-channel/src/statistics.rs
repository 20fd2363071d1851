//! Link-level statistics of the quantized surface.
//!
//! The received envelope is a sum of m near-aligned surface phasors plus
//! n_paths fully random environment phasors. Conditioned on the surface
//! configuration, the in-phase/quadrature pair is asymptotically Gaussian,
//! so the envelope is Rician with an effective line-of-sight power Xi^2
//! (the squared mean resultant) and diffuse power sigma (the total
//! quadrature variance). This module carries the closed-form maps from
//! hardware parameters to (Xi^2, sigma), the resulting outage laws, and the
//! estimators that recover the parameters from samples.

use crate::error::{Error, Result};
use crate::math::{ln_bessel_i0, ln_bessel_i1, marcum_p1, sinc, wrap_to_pi};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, PI};

/// Rician envelope parameters: shape K (line-of-sight to diffuse power
/// ratio) and total mean power Omega_p = E[R^2].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicianParams {
    pub k_factor: f64,
    pub omega_p: f64,
}

/// First and second moments of the complex envelope: squared mean resultant
/// Xi^2 and total quadrature variance sigma.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveMoments {
    pub xi_sq: f64,
    pub sigma: f64,
}

/// Nakagami envelope parameters: shape m and mean power Omega.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NakagamiParams {
    pub m: f64,
    pub omega: f64,
}

/// Sample moments of the quadrature pair (T_c, T_s): means, unbiased
/// variances, and covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureMoments {
    pub mean_c: f64,
    pub mean_s: f64,
    pub var_c: f64,
    pub var_s: f64,
    pub cov: f64,
}

// ─────────────────────────────────────────────────────────────────────────────
// Closed-form parameter maps
// ─────────────────────────────────────────────────────────────────────────────

/// Envelope moments of a surface steered with residual quantization step
/// `delta` and progressive per-element offset `delta_phi` (radians per
/// element), in front of `n_paths` unreflected paths:
///
/// ```text
///     Xi    = sqrt(omega_r) sinc(delta/2) |sin(m delta_phi / 2) / sin(delta_phi / 2)|,
///     sigma = m omega_r (1 - sinc^2(delta/2)) + n_paths omega_d.
/// ```
///
/// The offset enters only the mean (through the Dirichlet kernel); the
/// variance is independent of any fixed per-element phase shifts.
pub fn moments_off_target(
    m: usize,
    delta: f64,
    delta_phi: f64,
    omega_r: f64,
    n_paths: usize,
    omega_d: f64,
) -> EffectiveMoments {
    debug_assert!((0.0..=2.0 * PI).contains(&delta));
    debug_assert!(omega_r >= 0.0 && omega_d >= 0.0);
    let s = sinc(delta / 2.0);
    // The kernel depends on delta_phi only modulo 2 pi; wrapping first keeps
    // sin(delta_phi / 2) away from its zeros at the aliases.
    let dphi = wrap_to_pi(delta_phi);
    let dirichlet = if dphi == 0.0 {
        m as f64
    } else {
        (m as f64 * dphi / 2.0).sin() / (dphi / 2.0).sin()
    };
    EffectiveMoments {
        xi_sq: omega_r * s * s * dirichlet * dirichlet,
        sigma: m as f64 * omega_r * (1.0 - s * s) + n_paths as f64 * omega_d,
    }
}

/// Rician parameters implied by envelope moments: K = Xi^2 / sigma,
/// Omega_p = Xi^2 + sigma.
pub fn effective_shape(moments: &EffectiveMoments) -> Result<RicianParams> {
    if moments.sigma <= 0.0 || moments.sigma.is_nan() {
        return Err(Error::Config(format!(
            "diffuse power must be positive, got sigma = {}",
            moments.sigma
        )));
    }
    if moments.xi_sq < 0.0 || moments.xi_sq.is_nan() {
        return Err(Error::Config(format!(
            "squared mean resultant must be non-negative, got {}",
            moments.xi_sq
        )));
    }
    Ok(RicianParams {
        k_factor: moments.xi_sq / moments.sigma,
        omega_p: moments.xi_sq + moments.sigma,
    })
}

/// Effective Rician K of the on-target B-bit surface,
///
/// ```text
///     K = m sinc^2(delta/2) / (1 - sinc^2(delta/2) + 1/k_0_ratio),
/// ```
///
/// where k_0_ratio = m omega_r / (n_paths omega_d). An infinite ratio models
/// the absent-environment limit.
pub fn keff_discrete(m: usize, delta: f64, k_0_ratio: f64) -> f64 {
    debug_assert!(m >= 1 && (0.0..=2.0 * PI).contains(&delta) && k_0_ratio > 0.0);
    let s2 = sinc(delta / 2.0).powi(2);
    m as f64 * s2 / (1.0 - s2 + 1.0 / k_0_ratio)
}

/// Mean envelope power of the on-target B-bit surface,
///
/// ```text
///     Omega_p = omega_r [m + (m^2 - m) sinc^2(delta/2)] + n_paths omega_d.
/// ```
pub fn omega_discrete(m: usize, delta: f64, omega_r: f64, n_paths: usize, omega_d: f64) -> f64 {
    let s2 = sinc(delta / 2.0).powi(2);
    let m = m as f64;
    omega_r * (m + (m * m - m) * s2) + n_paths as f64 * omega_d
}

/// Surface power scaling factor: mean reflected power in units of omega_r,
///
/// ```text
///     sinc^2(delta/2) m^2 + (1 - sinc^2(delta/2)) m.
/// ```
///
/// Interpolates between coherent m^2 growth (delta = 0) and incoherent m
/// growth (delta = 2 pi).
pub fn power_scaling(m: usize, delta: f64) -> f64 {
    let s2 = sinc(delta / 2.0).powi(2);
    let m = m as f64;
    s2 * m * m + (1.0 - s2) * m
}

/// Effective Rician K of a continuously controlled surface steered off
/// target by a progressive offset `delta_phi` per element,
///
/// ```text
///     K = m^2 omega_r sinc^2(m delta_phi / 2) / (n_paths omega_d),
/// ```
///
/// the small-offset closed form of the exact Dirichlet-kernel moments.
pub fn keff_continuous(
    m: usize,
    omega_r: f64,
    delta_phi: f64,
    n_paths: usize,
    omega_d: f64,
) -> f64 {
    debug_assert!(omega_r >= 0.0 && omega_d > 0.0);
    let m = m as f64;
    let s = sinc(m * delta_phi / 2.0);
    m * m * omega_r * s * s / (n_paths as f64 * omega_d)
}

/// Straight-line law of the inverse shape against the inverse power ratio:
///
/// ```text
///     1/K = slope / k_0_ratio + intercept,
///     slope = 1 / (m sinc^2(delta/2)),
///     intercept = (1 - sinc^2(delta/2)) / (m sinc^2(delta/2)).
/// ```
///
/// Rejected at delta = 2 pi, where the coherent gain vanishes and the line
/// degenerates.
pub fn keff_inverse_line(m: usize, delta: f64) -> Result<(f64, f64)> {
    let s2 = sinc(delta / 2.0).powi(2);
    if s2 < 1e-30 {
        return Err(Error::Config(format!(
            "inverse-shape line degenerates as sinc^2(delta/2) -> 0 (delta = {delta})"
        )));
    }
    let slope = 1.0 / (m as f64 * s2);
    Ok((slope, slope * (1.0 - s2)))
}

/// Nakagami shape and power from the full Gaussian moments of the
/// quadrature pair. Writing A^2 for the squared mean resultant, sigma for
/// the total variance, and B for the anisotropy magnitude
/// sqrt(4 cov^2 + (var_c - var_s)^2),
///
/// ```text
///     m = (sigma + A^2)^2 / [ (sigma + A^2)^2 + B^2 - A^4
///                             + 2 A^2 B cos(2 (d_1 - d_2)) ],
/// ```
///
/// with d_1 the mean direction and d_2 half the anisotropy direction; the
/// denominator is exactly Var(R^2) for Gaussian quadratures. Omega is
/// sigma + A^2.
pub fn nakagami_m_general(moments: &QuadratureMoments) -> Result<NakagamiParams> {
    let QuadratureMoments {
        mean_c,
        mean_s,
        var_c,
        var_s,
        cov,
    } = *moments;
    if !(var_c >= 0.0 && var_s >= 0.0) {
        return Err(Error::Config(format!(
            "variances must be non-negative, got ({var_c}, {var_s})"
        )));
    }
    let a2 = mean_c * mean_c + mean_s * mean_s;
    let sigma = var_c + var_s;
    let b = (4.0 * cov * cov + (var_c - var_s) * (var_c - var_s)).sqrt();
    let d1 = mean_s.atan2(mean_c);
    let d2 = 0.5 * (2.0 * cov).atan2(var_c - var_s);
    let omega = sigma + a2;
    let denom = omega * omega + (b * b - a2 * a2) + 2.0 * a2 * b * (2.0 * (d1 - d2)).cos();
    if denom <= 0.0 || denom.is_nan() {
        return Err(Error::Config(format!(
            "envelope power does not fluctuate (Var(R^2) = {denom}); shape diverges"
        )));
    }
    Ok(NakagamiParams {
        m: omega * omega / denom,
        omega,
    })
}

/// Equal-variance reduction of the Nakagami shape: with isotropic
/// quadrature fluctuations the anisotropy term drops and
///
/// ```text
///     m = Omega_p^2 / (Omega_p^2 - Xi^4).
/// ```
pub fn nakagami_m_symmetric(moments: &EffectiveMoments) -> f64 {
    let omega = moments.xi_sq + moments.sigma;
    omega * omega / (omega * omega - moments.xi_sq * moments.xi_sq)
}

// ─────────────────────────────────────────────────────────────────────────────
// Densities and tail probabilities
// ─────────────────────────────────────────────────────────────────────────────

/// Rician envelope density at r >= 0, evaluated in the log domain so large
/// K does not overflow the Bessel factor.
pub fn rician_pdf(params: &RicianParams, r: f64) -> f64 {
    let RicianParams { k_factor: k, omega_p } = *params;
    debug_assert!(k >= 0.0 && omega_p > 0.0);
    if r <= 0.0 {
        return 0.0;
    }
    let scale = (k + 1.0) / omega_p;
    let ln_f = (2.0 * r * scale).ln() - k - scale * r * r
        + ln_bessel_i0(2.0 * r * (k * scale).sqrt());
    ln_f.exp()
}

/// Density of the instantaneous SNR gamma = mean_snr * R^2 / Omega_p under
/// Rician fading with shape `k_factor`.
pub fn snr_pdf(k_factor: f64, mean_snr: f64, gamma: f64) -> f64 {
    debug_assert!(k_factor >= 0.0 && mean_snr > 0.0);
    if gamma < 0.0 {
        return 0.0;
    }
    let scale = (k_factor + 1.0) / mean_snr;
    let ln_f = scale.ln() - k_factor - scale * gamma
        + ln_bessel_i0(2.0 * (k_factor * scale * gamma).sqrt());
    ln_f.exp()
}

/// P[R^2 < threshold_power] for a Rician envelope: the outage probability
/// of a link whose SNR threshold maps to the power threshold
/// `threshold_power` = gamma_min sigma^2 / P. Full relative accuracy is
/// kept in the deep tail.
pub fn outage_probability(params: &RicianParams, threshold_power: f64) -> f64 {
    let RicianParams { k_factor: k, omega_p } = *params;
    debug_assert!(k >= 0.0 && omega_p > 0.0);
    if threshold_power <= 0.0 {
        return 0.0;
    }
    let a = (2.0 * k).sqrt();
    let b = (2.0 * (k + 1.0) * threshold_power / omega_p).sqrt();
    marcum_p1(a, b)
}

/// Small-threshold slope of the outage law:
/// P[R^2 < t] -> (K + 1) e^{-K} t / Omega_p as t -> 0, linear in t, which
/// is the unit log-log slope of single-branch fading.
pub fn outage_asymptote(params: &RicianParams, threshold_power: f64) -> f64 {
    let RicianParams { k_factor: k, omega_p } = *params;
    (k + 1.0) * (-k).exp() * threshold_power / omega_p
}

// ─────────────────────────────────────────────────────────────────────────────
// Estimators
// ─────────────────────────────────────────────────────────────────────────────

/// Sample moments of the quadrature pair (unbiased variances/covariance).
pub fn quadrature_moments(samples: &[Complex64]) -> Result<QuadratureMoments> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::Fit(format!(
            "quadrature moments need at least 2 samples, got {n}"
        )));
    }
    if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Fit("sample contains non-finite values".into()));
    }
    let nf = n as f64;
    let mean_c = samples.iter().map(|z| z.re).sum::<f64>() / nf;
    let mean_s = samples.iter().map(|z| z.im).sum::<f64>() / nf;
    let (mut var_c, mut var_s, mut cov) = (0.0, 0.0, 0.0);
    for z in samples {
        let dc = z.re - mean_c;
        let ds = z.im - mean_s;
        var_c += dc * dc;
        var_s += ds * ds;
        cov += dc * ds;
    }
    Ok(QuadratureMoments {
        mean_c,
        mean_s,
        var_c: var_c / (nf - 1.0),
        var_s: var_s / (nf - 1.0),
        cov: cov / (nf - 1.0),
    })
}

/// Moment estimator of the effective Rician parameters from complex
/// envelope samples: Xi^2 from the squared mean resultant, sigma from the
/// total quadrature variance.
pub fn effective_moments(samples: &[Complex64]) -> Result<EffectiveMoments> {
    let q = quadrature_moments(samples)?;
    Ok(EffectiveMoments {
        xi_sq: q.mean_c * q.mean_c + q.mean_s * q.mean_s,
        sigma: q.var_c + q.var_s,
    })
}

/// E\[R\]^2 / E\[R^2\] of a Rician envelope with shape k: a strictly increasing
/// map from [0, inf) onto [pi/4, 1), evaluated in the log domain.
pub fn rician_moment_ratio(k: f64) -> f64 {
    debug_assert!(k >= 0.0);
    if k == 0.0 {
        return FRAC_PI_4;
    }
    let li0 = ln_bessel_i0(k / 2.0);
    let li1 = ln_bessel_i1(k / 2.0);
    let ln_bracket = li0 + ((1.0 + k) + k * (li1 - li0).exp()).ln();
    (FRAC_PI_4.ln() - (1.0 + k).ln() - k + 2.0 * ln_bracket).exp()
}

/// Method-of-moments Rician fit from envelope magnitudes: Omega_p from the
/// mean square, K by inverting the magnitude moment ratio. Ratios at or
/// below the Rayleigh value pi/4 clamp to K = 0; ratios at the constant-
/// envelope boundary are rejected.
pub fn fit_rician(magnitudes: &[f64]) -> Result<RicianParams> {
    let n = magnitudes.len();
    if n < 100 {
        return Err(Error::Fit(format!(
            "moment fit needs at least 100 samples, got {n}"
        )));
    }
    if magnitudes.iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(Error::Fit(
            "magnitudes must be finite and non-negative".into(),
        ));
    }
    let nf = n as f64;
    let mean = magnitudes.iter().sum::<f64>() / nf;
    let mean_sq = magnitudes.iter().map(|r| r * r).sum::<f64>() / nf;
    if mean_sq <= 0.0 || mean_sq.is_nan() {
        return Err(Error::Fit("all-zero sample has no envelope scale".into()));
    }
    let ratio = mean * mean / mean_sq;
    if ratio <= FRAC_PI_4 {
        return Ok(RicianParams {
            k_factor: 0.0,
            omega_p: mean_sq,
        });
    }
    if ratio >= 1.0 - 1e-12 {
        return Err(Error::Fit(format!(
            "moment ratio {ratio} is at the constant-envelope boundary"
        )));
    }
    // Bracket, then bisect the strictly increasing moment ratio.
    let mut hi = 1.0f64;
    while rician_moment_ratio(hi) < ratio {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Fit(format!(
                "moment ratio {ratio} implies an unresolvable shape above 1e12"
            )));
        }
    }
    let mut lo = 0.0f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if rician_moment_ratio(mid) < ratio {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * (1.0 + hi) {
            break;
        }
    }
    Ok(RicianParams {
        k_factor: 0.5 * (lo + hi),
        omega_p: mean_sq,
    })
}

/// Ordinary least-squares line through (xs, ys): returns (slope, intercept).
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() {
        return Err(Error::Dimension(format!(
            "fit_line got {} x values and {} y values",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::Fit("line fit needs at least 2 points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::Fit("degenerate line fit: all x equal".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

#[cfg(test)]
mod tests {
    // Reference values below are kept verbatim at full printed precision.
    #![allow(clippy::excessive_precision)]

    use super::*;

    fn close(got: f64, want: f64, rel: f64, what: &str) {
        assert!(
            (got - want).abs() <= rel * want.abs().max(1e-300),
            "{what}: got {got}, want {want}"
        );
    }

    #[test]
    fn discrete_closed_forms_at_one_bit() {
        // m = 50, delta = pi, power ratio 3: reference values from exact
        // high-precision evaluation.
        close(
            keff_discrete(50, PI, 3.0),
            21.835_318_490_277_767,
            1e-14,
            "one-bit effective shape",
        );
        close(
            omega_discrete(50, PI, 1.0, 64, 50.0 / (64.0 * 3.0)),
            1_059.614_266_361_576_8,
            1e-14,
            "one-bit mean power",
        );
        close(
            power_scaling(50, PI),
            1_042.947_599_694_910_2,
            1e-14,
            "one-bit power scaling",
        );
        // Limits: perfect control and no control.
        close(keff_discrete(50, 0.0, 3.0), 150.0, 1e-14, "delta = 0 shape");
        assert!(keff_discrete(50, 2.0 * PI, 3.0) < 1e-30);
        close(power_scaling(50, 0.0), 2500.0, 1e-14, "coherent scaling");
        close(power_scaling(50, 2.0 * PI), 50.0, 1e-12, "incoherent scaling");
    }

    #[test]
    fn moment_map_agrees_with_discrete_forms_on_target() {
        for (m, delta, k0) in [(5usize, PI, 1.0), (20, PI / 2.0, 10.0), (100, PI, 50.0)] {
            let omega_d = m as f64 / (64.0 * k0);
            let moments = moments_off_target(m, delta, 0.0, 1.0, 64, omega_d);
            let shape = effective_shape(&moments).unwrap();
            close(
                shape.k_factor,
                keff_discrete(m, delta, k0),
                1e-12,
                &format!("K at m = {m}"),
            );
            close(
                shape.omega_p,
                omega_discrete(m, delta, 1.0, 64, omega_d),
                1e-12,
                &format!("Omega_p at m = {m}"),
            );
        }
    }

    #[test]
    fn inverse_line_matches_tabulated_coefficients() {
        let (slope, intercept) = keff_inverse_line(20, PI).unwrap();
        close(slope, 0.123_370_055_013_616_98, 1e-14, "slope");
        close(intercept, 0.073_370_055_013_616_983, 1e-14, "intercept");
        // Consistency: 1/K = slope / k0 + intercept.
        for k0 in [1.0, 2.0, 17.5] {
            close(
                1.0 / keff_discrete(20, PI, k0),
                slope / k0 + intercept,
                1e-12,
                &format!("line at k0 = {k0}"),
            );
        }
        assert!(keff_inverse_line(20, 2.0 * PI).is_err());
    }

    #[test]
    fn off_target_moments_use_the_exact_kernel() {
        // Close to target the closed form and the exact kernel agree well.
        let (m, dphi) = (100usize, PI / 200.0);
        let moments = moments_off_target(m, 0.0, dphi, 1.0, 64, 10.0 / 64.0);
        let exact_k = effective_shape(&moments).unwrap().k_factor;
        close(exact_k, 810.586_136_010_987_6, 1e-12, "exact kernel shape");
        let formula = keff_continuous(m, 1.0, dphi, 64, 10.0 / 64.0);
        close(formula, 810.569_469_138_702_2, 1e-12, "sinc closed form");
        assert!(
            (exact_k - formula).abs() / formula < 1e-3,
            "kernel and closed form diverge: {exact_k} vs {formula}"
        );
        // Far off target the mean collapses but the variance does not move.
        let far = moments_off_target(m, 0.0, 2.0 * PI / m as f64, 1.0, 64, 10.0 / 64.0);
        assert!(far.xi_sq < 1e-25, "null of the kernel, got {}", far.xi_sq);
        close(far.sigma, 10.0, 1e-14, "variance is offset independent");
    }

    #[test]
    fn nakagami_shape_general_and_symmetric() {
        // One-bit m = 50 scenario, symmetrized variances.
        let moments = EffectiveMoments {
            xi_sq: 31.830_988_618_379_07f64.powi(2),
            sigma: 46.402_429_938_199_11,
        };
        close(
            nakagami_m_symmetric(&moments),
            11.673_255_762_603_11,
            1e-13,
            "symmetric reduction",
        );
        // General formula equals the direct Gaussian Var(R^2) expression.
        let q = QuadratureMoments {
            mean_c: 31.830_988_618_379_07,
            mean_s: 0.0,
            var_c: 13.069_096_604_865_78,
            var_s: 33.333_333_333_333_33,
            cov: 0.0,
        };
        let got = nakagami_m_general(&q).unwrap();
        let a2 = q.mean_c * q.mean_c + q.mean_s * q.mean_s;
        let var_r2 = 2.0 * q.var_c * q.var_c + 2.0 * q.var_s * q.var_s
            + 4.0 * q.cov * q.cov
            + 4.0 * (q.mean_c * q.mean_c * q.var_c
                + q.mean_s * q.mean_s * q.var_s
                + 2.0 * q.mean_c * q.mean_s * q.cov);
        let want = (q.var_c + q.var_s + a2).powi(2) / var_r2;
        close(got.m, want, 1e-12, "general shape vs Gaussian moments");
        close(got.omega, a2 + q.var_c + q.var_s, 1e-14, "power");
        // Rotating the mean into the quadrature axis must not change m.
        let rotated = QuadratureMoments {
            mean_c: 0.0,
            mean_s: q.mean_c,
            var_c: q.var_s,
            var_s: q.var_c,
            cov: 0.0,
        };
        close(
            nakagami_m_general(&rotated).unwrap().m,
            got.m,
            1e-12,
            "rotation invariance",
        );
    }

    #[test]
    fn outage_matches_reference_tail_values() {
        // K = 20, normalized threshold 1e-4: deep tail.
        let params = RicianParams {
            k_factor: 20.0,
            omega_p: 1.0,
        };
        close(
            outage_probability(&params, 1e-4),
            4.415_288_167_124_087_1e-12,
            1e-9,
            "deep tail outage",
        );
        // K = 5, threshold 0.001.
        let params = RicianParams {
            k_factor: 5.0,
            omega_p: 1.0,
        };
        close(
            outage_probability(&params, 1e-3),
            marcum_p1((10.0f64).sqrt(), (2.0 * 6.0 * 1e-3f64).sqrt()),
            1e-12,
            "definition consistency",
        );
        // Scale invariance in omega_p.
        let scaled = RicianParams {
            k_factor: 5.0,
            omega_p: 7.3,
        };
        close(
            outage_probability(&scaled, 7.3e-3),
            outage_probability(&params, 1e-3),
            1e-12,
            "omega_p scaling",
        );
        // The asymptote bounds the small-threshold behavior.
        let asym = outage_asymptote(&params, 1e-6);
        let exact = outage_probability(&params, 1e-6);
        assert!(
            (exact / asym - 1.0).abs() < 1e-3,
            "asymptote off by {}",
            exact / asym - 1.0
        );
    }

    #[test]
    fn moment_ratio_fit_recovers_exact_moments() {
        // Synthetic two-point sample with exactly the Rician (E R, E R^2)
        // of K = 5, Omega = 2: the fit must invert to K = 5.
        let (k, omega) = (5.0, 2.0);
        let ratio = rician_moment_ratio(k);
        let mean = (ratio * omega).sqrt();
        let spread = (omega - mean * mean).sqrt();
        let mut sample = Vec::new();
        for _ in 0..200 {
            sample.push(mean + spread);
            sample.push(mean - spread);
        }
        let fit = fit_rician(&sample).unwrap();
        close(fit.k_factor, k, 1e-9, "shape recovery");
        close(fit.omega_p, omega, 1e-12, "power recovery");
        // Rayleigh-or-below ratios clamp at zero shape.
        let mut flat: Vec<f64> = Vec::new();
        for i in 0..300 {
            flat.push((i % 30) as f64);
        }
        let fit = fit_rician(&flat).unwrap();
        assert_eq!(fit.k_factor, 0.0, "sub-Rayleigh ratio must clamp");
        // Constant envelope is rejected, short samples are rejected.
        assert!(fit_rician(&vec![1.0; 500]).is_err());
        assert!(fit_rician(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn moment_ratio_is_monotone_with_correct_endpoints() {
        assert_eq!(rician_moment_ratio(0.0), FRAC_PI_4);
        let mut prev = FRAC_PI_4;
        for i in 1..=60 {
            let k = i as f64 * 0.5;
            let g = rician_moment_ratio(k);
            assert!(g > prev, "ratio not increasing at k = {k}: {g} <= {prev}");
            assert!(g < 1.0, "ratio must stay below 1, got {g} at k = {k}");
            prev = g;
        }
        // Spot values against 40-digit quadrature of the exact moments.
        for (k, want) in [
            (5.0, 0.921_465_817_528_383_3),
            (15.0, 0.969_290_111_044_508),
            (30.0, 0.984_007_728_111_939_1),
        ] {
            let got = rician_moment_ratio(k);
            let rel = ((got - want) / want).abs();
            assert!(rel < 1e-13, "ratio({k}) = {got:.16}, want {want:.16}");
        }
    }

    #[test]
    fn pdf_basic_shape() {
        let params = RicianParams {
            k_factor: 4.0,
            omega_p: 3.0,
        };
        assert_eq!(rician_pdf(&params, 0.0), 0.0);
        assert_eq!(rician_pdf(&params, -1.0), 0.0);
        // Density concentrates near the line-of-sight amplitude.
        let peak_region = rician_pdf(&params, (params.omega_p * 0.8).sqrt());
        let tail = rician_pdf(&params, 4.0 * params.omega_p.sqrt());
        assert!(peak_region > 10.0 * tail);
        // snr form agrees with the envelope form under the change of
        // variables gamma = rho r^2 (Jacobian 1 / (2 r rho) at omega_p = 1).
        let rho = 13.0;
        let r = 0.9f64;
        let unit = RicianParams {
            k_factor: 4.0,
            omega_p: 1.0,
        };
        let lhs = snr_pdf(4.0, rho, rho * r * r) * 2.0 * r * rho;
        let rhs = rician_pdf(&unit, r);
        assert!(
            (lhs - rhs).abs() < 1e-12 * rhs,
            "snr and envelope densities disagree: {lhs} vs {rhs}"
        );
    }

    #[test]
    fn line_fit_recovers_exact_line() {
        let xs = [0.1, 0.5, 1.0, 2.0, 5.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.5 * x - 0.75).collect();
        let (slope, intercept) = fit_line(&xs, &ys).unwrap();
        close(slope, 3.5, 1e-13, "slope");
        close(intercept, -0.75, 1e-12, "intercept");
        assert!(fit_line(&[1.0, 1.0], &[2.0, 3.0]).is_err());
    }
}
