//! Scalar special functions shared across the crate.
//!
//! Everything here is real-valued and total over its documented domain:
//! the unnormalized sinc, angle wrapping, log-domain modified Bessel
//! functions of the first kind, and the first-order Marcum Q-function
//! together with its lower-tail companion.

use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};
use std::f64::consts::TAU;

/// Unnormalized sinc: sin(x)/x, with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Wrap an angle to the half-open interval [0, 2*pi).
pub fn wrap_to_2pi(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    // rem_euclid can land exactly on TAU for tiny negative inputs.
    if y >= TAU {
        0.0
    } else {
        y
    }
}

/// Wrap an angle to (-pi, pi]. The branch point maps as -pi -> pi.
pub fn wrap_to_pi(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > std::f64::consts::PI {
        y - TAU
    } else {
        y
    }
}

// ─────────────────────────────────────────────────────────────────────────────
// Modified Bessel functions of the first kind, log domain.
//
// The power series is exact to working precision up to the crossover; past it
// the large-argument asymptotic expansion
//
//     I_nu(z) ~ e^z / sqrt(2 pi z) * [1 - (mu-1)/(8z) + (mu-1)(mu-9)/(2!(8z)^2) - ...],
//     mu = 4 nu^2
//
// has its smallest term well below 1e-12 relative. Working in logs keeps
// I_0(700) and friends finite where the plain value has long overflowed.
// ─────────────────────────────────────────────────────────────────────────────

const BESSEL_SERIES_CUTOFF: f64 = 22.0;

/// ln I_0(x) for x >= 0.
pub fn ln_bessel_i0(x: f64) -> f64 {
    debug_assert!(x >= 0.0, "ln_bessel_i0 domain is x >= 0, got {x}");
    if x <= BESSEL_SERIES_CUTOFF {
        let q = x * x / 4.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        while term > sum * 1e-18 {
            term *= q / (k * k);
            sum += term;
            k += 1.0;
        }
        sum.ln()
    } else {
        x + asymptotic_tail(x, 0.0).ln_1p() - 0.5 * (TAU * x).ln()
    }
}

/// ln I_1(x) for x >= 0. Returns -inf at x = 0.
pub fn ln_bessel_i1(x: f64) -> f64 {
    debug_assert!(x >= 0.0, "ln_bessel_i1 domain is x >= 0, got {x}");
    if x == 0.0 {
        return f64::NEG_INFINITY;
    }
    if x <= BESSEL_SERIES_CUTOFF {
        // I_1(x) = (x/2) * sum_k q^k / (k! (k+1)!), q = x^2/4.
        let q = x * x / 4.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        while term > sum * 1e-18 {
            term *= q / (k * (k + 1.0));
            sum += term;
            k += 1.0;
        }
        (x / 2.0).ln() + sum.ln()
    } else {
        x + asymptotic_tail(x, 4.0).ln_1p() - 0.5 * (TAU * x).ln()
    }
}

/// Correction series of the large-argument expansion, excluding the leading 1.
/// `mu` is 4 nu^2. Terms are summed until they stop improving; the expansion
/// is asymptotic, so growth of a term ends the sum.
fn asymptotic_tail(x: f64, mu: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..=16 {
        let k = k as f64;
        let odd = 2.0 * k - 1.0;
        term *= (odd * odd - mu) / (8.0 * k * x);
        if term.abs() >= prev {
            break;
        }
        sum += term;
        prev = term.abs();
        if prev < 1e-18 {
            break;
        }
    }
    sum
}

// ─────────────────────────────────────────────────────────────────────────────
// First-order Marcum Q-function.
//
// Q_1(a, b) = integral_b^inf t exp(-(t^2 + a^2)/2) I_0(a t) dt
//
// evaluated through the Poisson-mixture identity: with x = a^2/2, y = b^2/2,
//
//     Q_1(a, b) = sum_{j>=0} pois(j; x) * P[Pois(y) <= j].
//
// The sum is walked outward from j0 = floor(x), where the Poisson weight
// peaks. One regularized incomplete-gamma evaluation anchors the inner
// cumulative at j0; one-step recurrences extend it in both directions. The
// lower tail P_1 = 1 - Q_1 uses the mirrored inner tail P[Pois(y) > j]
// directly, which keeps full relative accuracy down to the underflow floor
// instead of dying at 1 - 1 = 0.
// ─────────────────────────────────────────────────────────────────────────────

/// Upper tail Q_1(a, b) for a, b >= 0. Clamped to [0, 1].
pub fn marcum_q1(a: f64, b: f64) -> f64 {
    debug_assert!(a >= 0.0 && b >= 0.0, "marcum_q1 domain is a, b >= 0");
    let x = a * a / 2.0;
    let y = b * b / 2.0;
    if y == 0.0 {
        return 1.0;
    }
    if x == 0.0 {
        return (-y).exp();
    }
    if upper_tail_is_smaller(x, y) {
        marcum_sum(x, y, Tail::Upper)
    } else {
        (1.0 - marcum_sum(x, y, Tail::Lower)).clamp(0.0, 1.0)
    }
}

/// Lower tail P_1(a, b) = 1 - Q_1(a, b), accurate when the complement is tiny.
pub fn marcum_p1(a: f64, b: f64) -> f64 {
    debug_assert!(a >= 0.0 && b >= 0.0, "marcum_p1 domain is a, b >= 0");
    let x = a * a / 2.0;
    let y = b * b / 2.0;
    if y == 0.0 {
        return 0.0;
    }
    if x == 0.0 {
        return -(-y).exp_m1();
    }
    if upper_tail_is_smaller(x, y) {
        (1.0 - marcum_sum(x, y, Tail::Upper)).clamp(0.0, 1.0)
    } else {
        marcum_sum(x, y, Tail::Lower)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Tail {
    Upper,
    Lower,
}

/// Whichever tail is smaller is the one to compute directly. The crossing
/// sits near y = x + 1; the margin only affects which side gets the full
/// relative accuracy, both sides are absolutely accurate.
fn upper_tail_is_smaller(x: f64, y: f64) -> bool {
    y >= x + 1.0
}

/// Poisson pmf at integer j with rate `lam`, evaluated through logs so that
/// huge rates and far tails underflow gracefully to zero.
fn poisson_pmf(j: f64, lam: f64) -> f64 {
    (-lam + j * lam.ln() - ln_gamma(j + 1.0)).exp()
}

/// Keeps the multiplicative pmf recurrence honest near the underflow floor.
///
/// A chain that has flushed to zero cannot recover on its own, and one that
/// re-enters through a subnormal carries only a handful of significant bits
/// which every later step then inherits (a percent-level bias in practice).
/// So when the running value drops out of the normal range, recompute it
/// from logs, and only accept the fresh value once it is itself normal; the
/// sub-MIN_POSITIVE mass skipped this way is far below the accuracy target
/// of the accumulated weights.
fn steadied_pmf(py: f64, j: f64, lam: f64) -> f64 {
    if py.is_normal() {
        return py;
    }
    let fresh = poisson_pmf(j, lam);
    if fresh.is_normal() {
        fresh
    } else {
        0.0
    }
}

/// Two-sided sweep of sum_j pois(j; x) * w_y(j), where the inner weight is
/// the cumulative P[Pois(y) <= j] (upper tail) or P[Pois(y) > j] (lower).
fn marcum_sum(x: f64, y: f64, tail: Tail) -> f64 {
    let j0 = x.floor();
    let p0 = poisson_pmf(j0, x);
    let py0 = poisson_pmf(j0, y);
    // P[Pois(y) <= j] = gamma_ur(j + 1, y); P[Pois(y) > j] = gamma_lr(j + 1, y).
    let w0 = match tail {
        Tail::Upper => gamma_ur(j0 + 1.0, y),
        Tail::Lower => gamma_lr(j0 + 1.0, y),
    };

    // Terms can peak far from j0: the product pois(j; x) * pois(j; y) is
    // largest near sqrt(x y), so no early exit is taken inside that radius.
    let j_peak = (x * y).sqrt();
    let mut total = 0.0;

    // Upward: j0, j0 + 1, ...
    let mut p = p0;
    let mut py = py0;
    let mut w = w0;
    let mut j = j0;
    loop {
        total += p * w;
        j += 1.0;
        py = steadied_pmf(py * (y / j), j, y);
        p *= x / j;
        w = match tail {
            Tail::Upper => (w + py).min(1.0),
            Tail::Lower => (w - py).max(0.0),
        };
        let term = p * w;
        if j > x && j > j_peak && term <= total * 1e-18 {
            break;
        }
        if j - j0 > 40_000_000.0 {
            break;
        }
    }

    // Downward: j0 - 1, ..., 0.
    let mut p = p0;
    let mut py = py0;
    let mut w = w0;
    let mut j = j0;
    let mut steps = 0u64;
    while j >= 1.0 {
        p *= j / x;
        w = match tail {
            Tail::Upper => (w - py).max(0.0),
            Tail::Lower => (w + py).min(1.0),
        };
        py = steadied_pmf(py * (j / y), j - 1.0, y);
        j -= 1.0;
        let term = p * w;
        total += term;
        if j < j_peak && term <= total * 1e-18 {
            break;
        }
        steps += 1;
        if steps > 40_000_000 {
            break;
        }
    }

    total.clamp(0.0, 1.0)
}
