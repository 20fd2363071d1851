//! Multi-user access on top of the surface-assisted channel: NOMA with
//! successive interference cancellation against orthogonal FDMA/TDMA.
//!
//! The surface is steered toward one target angle; every user sees a Rician
//! channel whose parameters follow from its angular offset to the target
//! (and optionally the per-element pattern weighting). Power-domain NOMA
//! ranks users by mean channel power, gives the weakest user the largest
//! allocation, and decodes in that order at every receiver.

use crate::error::{Error, Result};
use crate::math::sinc;
use crate::montecarlo::{sample_rician, trial_rng};
use crate::statistics::{
    effective_shape, moments_off_target, outage_probability, RicianParams,
};
use std::f64::consts::{FRAC_PI_2, PI};

/// One user of the shared link: its departure angle and the mean power of
/// one unreflected path toward it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaUser {
    pub angle: f64,
    pub omega_d: f64,
}

/// Access scheme under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaScheme {
    /// Power-domain NOMA with successive interference cancellation.
    Noma,
    /// Orthogonal frequency split: each user gets bandwidth 1/q and power
    /// `fdma_power` (noise scales with its band).
    Fdma,
    /// Orthogonal time split: each user gets the full power 1/q of the time.
    Tdma,
}

/// Shared-link scenario: the surface, the transmit budget, and the users
/// with their decode-order allocations.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiAccessScenario {
    pub m: usize,
    pub n_paths: usize,
    pub omega_r: f64,
    pub theta_in: f64,
    pub p_x_over_lambda: f64,
    /// Quantizer step of the surface phases.
    pub delta: f64,
    pub users: Vec<MaUser>,
    /// Power allocations by decode position, weakest channel first, so the
    /// sequence is non-increasing and sums to one.
    pub allocations: Vec<f64>,
    /// Linear SINR thresholds by decode position.
    pub thresholds: Vec<f64>,
    /// Transmit SNR P_t / sigma^2, linear.
    pub snr: f64,
    /// Per-user FDMA transmit power as a fraction of P_t; None means the
    /// even split 1/q that makes FDMA and TDMA coincide.
    pub fdma_power: Option<f64>,
    /// Weight each user's reflected path power by the squared per-element
    /// pattern gain at its angle.
    pub element_weighted: bool,
}

impl MultiAccessScenario {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n_paths == 0 {
            return Err(Error::Scenario(
                "element and path counts must be positive".into(),
            ));
        }
        if !(self.omega_r.is_finite() && self.omega_r >= 0.0) {
            return Err(Error::Scenario(format!(
                "omega_r must be finite and non-negative, got {}",
                self.omega_r
            )));
        }
        if self.p_x_over_lambda <= 0.0 || self.p_x_over_lambda.is_nan() {
            return Err(Error::Scenario(format!(
                "element pitch ratio must be positive, got {}",
                self.p_x_over_lambda
            )));
        }
        if !(0.0..=2.0 * PI).contains(&self.delta) {
            return Err(Error::Scenario(format!(
                "quantizer step must lie in [0, 2 pi], got {}",
                self.delta
            )));
        }
        if !(self.snr.is_finite() && self.snr > 0.0) {
            return Err(Error::Scenario(format!(
                "transmit SNR must be positive and finite, got {}",
                self.snr
            )));
        }
        let q = self.users.len();
        if q == 0 {
            return Err(Error::Scenario("at least one user is required".into()));
        }
        for (i, user) in self.users.iter().enumerate() {
            if !user.angle.is_finite() || user.angle.abs() >= FRAC_PI_2 {
                return Err(Error::Scenario(format!(
                    "user {i} angle must lie in (-pi/2, pi/2), got {}",
                    user.angle
                )));
            }
            if !(user.omega_d.is_finite() && user.omega_d >= 0.0) {
                return Err(Error::Scenario(format!(
                    "user {i} omega_d must be finite and non-negative, got {}",
                    user.omega_d
                )));
            }
        }
        if self.allocations.len() != q || self.thresholds.len() != q {
            return Err(Error::Scenario(format!(
                "{} users need {} allocations and thresholds, got {} and {}",
                q,
                q,
                self.allocations.len(),
                self.thresholds.len()
            )));
        }
        if self.allocations.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::Scenario("allocations must be positive".into()));
        }
        let total: f64 = self.allocations.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Scenario(format!(
                "allocations must sum to 1, got {total}"
            )));
        }
        if self.allocations.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::Scenario(
                "allocations must be non-increasing in decode order".into(),
            ));
        }
        if self.thresholds.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::Scenario(
                "SINR thresholds must be positive and finite".into(),
            ));
        }
        if let Some(p) = self.fdma_power {
            if !(p.is_finite() && p > 0.0) {
                return Err(Error::Scenario(format!(
                    "FDMA power fraction must be positive, got {p}"
                )));
            }
        }
        Ok(())
    }

    /// Relative per-element pattern gain at departure angle `theta`:
    /// cos(theta) sinc(pi (p_x / lambda) (sin theta - sin theta_in)), or 1
    /// when element weighting is off.
    pub fn element_gain(&self, theta: f64) -> f64 {
        if !self.element_weighted {
            return 1.0;
        }
        let arg = PI * self.p_x_over_lambda * (theta.sin() - self.theta_in.sin());
        theta.cos() * sinc(arg)
    }

    /// Rician channel of user `user` when the surface is steered toward
    /// `target_angle`: the angular offset enters as a progressive
    /// per-element phase of k_0 p_x (sin theta_k - sin target) on top of the
    /// quantization residuals.
    pub fn user_channel(&self, user: usize, target_angle: f64) -> Result<RicianParams> {
        let u = self
            .users
            .get(user)
            .ok_or_else(|| Error::Scenario(format!("no user with index {user}")))?;
        if !target_angle.is_finite() || target_angle.abs() >= FRAC_PI_2 {
            return Err(Error::Scenario(format!(
                "target angle must lie in (-pi/2, pi/2), got {target_angle}"
            )));
        }
        let gain = self.element_gain(u.angle);
        let omega_rk = self.omega_r * gain * gain;
        let dphi = 2.0 * PI * self.p_x_over_lambda * (u.angle.sin() - target_angle.sin());
        let moments =
            moments_off_target(self.m, self.delta, dphi, omega_rk, self.n_paths, u.omega_d);
        effective_shape(&moments)
    }

    /// User indices sorted by mean channel power, weakest first: the NOMA
    /// decode order (ties keep listing order).
    pub fn decode_order(&self, target_angle: f64) -> Result<Vec<usize>> {
        let mut powers = Vec::with_capacity(self.users.len());
        for k in 0..self.users.len() {
            powers.push(self.user_channel(k, target_angle)?.omega_p);
        }
        let mut order: Vec<usize> = (0..self.users.len()).collect();
        order.sort_by(|&a, &b| powers[a].partial_cmp(&powers[b]).expect("finite powers"));
        Ok(order)
    }

    /// Effective per-user transmit power and noise scale of one orthogonal
    /// slot: (power, noise) relative to (P_t, sigma^2).
    fn orthogonal_slot(&self, scheme: MaScheme) -> (f64, f64) {
        let q = self.users.len() as f64;
        match scheme {
            MaScheme::Fdma => (self.fdma_power.unwrap_or(1.0 / q), 1.0 / q),
            MaScheme::Tdma => (1.0, 1.0),
            MaScheme::Noma => unreachable!("orthogonal slot of a non-orthogonal scheme"),
        }
    }
}

/// NOMA SINR of the message at decode position `position`, observed through
/// a channel of power gain `w` at transmit SNR `snr`:
///
/// ```text
///     gamma = w snr a_l / (w snr sum_{p > l} a_p + 1).
/// ```
pub fn noma_sinr(w: f64, snr: f64, allocations: &[f64], position: usize) -> f64 {
    let interference: f64 = allocations[position + 1..].iter().sum();
    w * snr * allocations[position] / (w * snr * interference + 1.0)
}

/// Channel-power threshold for decoding at position `position`, or the
/// distinguished infeasibility marker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdResult {
    /// Decoding succeeds exactly when the channel power exceeds this value.
    Feasible(f64),
    /// The allocation cannot meet the threshold at any channel power: the
    /// interference term alone exceeds the margin at this decode position.
    Infeasible { position: usize },
}

/// Minimum channel power w at which a receiver decoding at position `k`
/// clears every SIC stage: each stage l <= k requires
///
/// ```text
///     w >= tau_l / (a_l - tau_l sum_{p > l} a_p) / snr,
/// ```
///
/// and the decode event is monotone in w, so the binding stage is the
/// largest such bound. A non-positive denominator at any stage makes that
/// stage undecodable outright.
pub fn outage_threshold(
    allocations: &[f64],
    thresholds: &[f64],
    position: usize,
    snr: f64,
) -> ThresholdResult {
    debug_assert!(position < allocations.len());
    let mut bound = 0.0f64;
    for l in 0..=position {
        let interference: f64 = allocations[l + 1..].iter().sum();
        let margin = allocations[l] - thresholds[l] * interference;
        if margin <= 0.0 {
            return ThresholdResult::Infeasible { position: l };
        }
        bound = bound.max(thresholds[l] / margin / snr);
    }
    ThresholdResult::Feasible(bound)
}

/// Outage of one user under one scheme, as a probability or the
/// distinguished always-out marker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OutageOutcome {
    Probability(f64),
    /// NOMA decoding is infeasible at the given stage regardless of the
    /// channel realization.
    AlwaysOut { position: usize },
}

impl OutageOutcome {
    pub fn probability(&self) -> f64 {
        match self {
            OutageOutcome::Probability(p) => *p,
            OutageOutcome::AlwaysOut { .. } => 1.0,
        }
    }
}

/// Outage probability of user `user` under `scheme` with the surface
/// steered toward `target_angle`.
pub fn user_outage(
    scenario: &MultiAccessScenario,
    user: usize,
    target_angle: f64,
    scheme: MaScheme,
) -> Result<OutageOutcome> {
    scenario.validate()?;
    let channel = scenario.user_channel(user, target_angle)?;
    match scheme {
        MaScheme::Noma => {
            let order = scenario.decode_order(target_angle)?;
            let position = order
                .iter()
                .position(|&u| u == user)
                .expect("user index is in its own decode order");
            match outage_threshold(
                &scenario.allocations,
                &scenario.thresholds,
                position,
                scenario.snr,
            ) {
                ThresholdResult::Feasible(w) => {
                    Ok(OutageOutcome::Probability(outage_probability(&channel, w)))
                }
                ThresholdResult::Infeasible { position } => {
                    Ok(OutageOutcome::AlwaysOut { position })
                }
            }
        }
        MaScheme::Fdma | MaScheme::Tdma => {
            let order = scenario.decode_order(target_angle)?;
            let position = order
                .iter()
                .position(|&u| u == user)
                .expect("user index is in its own decode order");
            let (power, noise) = scenario.orthogonal_slot(scheme);
            let w = scenario.thresholds[position] * noise / (power * scenario.snr);
            Ok(OutageOutcome::Probability(outage_probability(&channel, w)))
        }
    }
}

/// Ergodic sum rate (bit/s/Hz) of the scenario under `scheme`, estimated by
/// seeded Monte Carlo over the per-user Rician channels. NOMA credits a
/// user's own rate only when every earlier SIC stage at its receiver clears
/// its threshold; orthogonal schemes carry the 1/q resource factor.
pub fn sum_rate(
    scenario: &MultiAccessScenario,
    target_angle: f64,
    scheme: MaScheme,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    scenario.validate()?;
    if trials == 0 {
        return Err(Error::Scenario("sum rate needs at least one trial".into()));
    }
    let q = scenario.users.len();
    let mut channels = Vec::with_capacity(q);
    for k in 0..q {
        channels.push(scenario.user_channel(k, target_angle)?);
    }
    let order = scenario.decode_order(target_angle)?;

    let mut total = 0.0f64;
    let mut w = vec![0.0f64; q];
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial as u64);
        for (k, ch) in channels.iter().enumerate() {
            w[k] = sample_rician(ch.k_factor, ch.omega_p, &mut rng).norm_sqr();
        }
        match scheme {
            MaScheme::Noma => {
                for (position, &user) in order.iter().enumerate() {
                    let sic_cleared = (0..position).all(|l| {
                        noma_sinr(w[user], scenario.snr, &scenario.allocations, l)
                            >= scenario.thresholds[l]
                    });
                    if sic_cleared {
                        let own =
                            noma_sinr(w[user], scenario.snr, &scenario.allocations, position);
                        total += (1.0 + own).log2();
                    }
                }
            }
            MaScheme::Fdma | MaScheme::Tdma => {
                let (power, noise) = scenario.orthogonal_slot(scheme);
                for &user in &order {
                    let gamma = w[user] * power * scenario.snr / noise;
                    total += (1.0 + gamma).log2() / q as f64;
                }
            }
        }
    }
    Ok(total / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_user_scenario() -> MultiAccessScenario {
        MultiAccessScenario {
            m: 20,
            n_paths: 64,
            omega_r: 1.0,
            theta_in: 0.0,
            p_x_over_lambda: 0.5,
            delta: 0.0,
            users: vec![
                MaUser {
                    angle: 15f64.to_radians(),
                    omega_d: 1.0 / 64.0,
                },
                MaUser {
                    angle: 33f64.to_radians(),
                    omega_d: 1.0 / 64.0,
                },
            ],
            allocations: vec![0.6, 0.4],
            thresholds: vec![1.0, 1.0],
            snr: 10.0,
            fdma_power: None,
            element_weighted: true,
        }
    }

    #[test]
    fn threshold_takes_the_binding_stage() {
        // a = (0.6, 0.4), tau = (1, 1): stage 0 needs w >= 1 / (0.6 - 0.4),
        // stage 1 needs w >= 1 / 0.4; the later receiver is bound by the
        // earlier message.
        let snr = 2.0;
        match outage_threshold(&[0.6, 0.4], &[1.0, 1.0], 1, snr) {
            ThresholdResult::Feasible(w) => {
                assert!((w - 5.0 / snr).abs() < 1e-14, "binding stage bound, got {w}");
            }
            other => panic!("expected feasible threshold, got {other:?}"),
        }
        match outage_threshold(&[0.6, 0.4], &[1.0, 1.0], 0, snr) {
            ThresholdResult::Feasible(w) => {
                assert!((w - 5.0 / snr).abs() < 1e-14, "stage 0 bound, got {w}");
            }
            other => panic!("expected feasible threshold, got {other:?}"),
        }
    }

    #[test]
    fn infeasible_allocation_is_distinguished() {
        // tau_0 = 1.5 wipes out the margin 0.6 - 1.5 * 0.4 = 0.
        let r = outage_threshold(&[0.6, 0.4], &[1.5, 1.0], 1, 10.0);
        assert_eq!(r, ThresholdResult::Infeasible { position: 0 });
        let scenario = MultiAccessScenario {
            thresholds: vec![1.5, 1.0],
            ..two_user_scenario()
        };
        let outcome = user_outage(&scenario, 0, 15f64.to_radians(), MaScheme::Noma).unwrap();
        assert_eq!(outcome, OutageOutcome::AlwaysOut { position: 0 });
        assert_eq!(outcome.probability(), 1.0);
    }

    #[test]
    fn sinr_threshold_crossing_matches_decode_events() {
        // Just above the threshold every stage clears; just below, one
        // fails.
        let (a, tau, snr) = ([0.6, 0.4], [0.9, 1.1], 4.0);
        let w = match outage_threshold(&a, &tau, 1, snr) {
            ThresholdResult::Feasible(w) => w,
            other => panic!("expected feasible, got {other:?}"),
        };
        for (l, threshold) in tau.iter().enumerate() {
            assert!(
                noma_sinr(w * (1.0 + 1e-9), snr, &a, l) >= *threshold,
                "stage {l} fails just above the threshold"
            );
        }
        let below = (0..=1).all(|l| noma_sinr(w * (1.0 - 1e-9), snr, &a, l) >= tau[l]);
        assert!(!below, "all stages clear just below the threshold");
    }

    #[test]
    fn decode_order_ranks_by_mean_power() {
        let scenario = two_user_scenario();
        let target = 15f64.to_radians();
        // Steered at user 0, user 1 is off target and weaker.
        let order = scenario.decode_order(target).unwrap();
        assert_eq!(order, vec![1, 0]);
        let p0 = scenario.user_channel(0, target).unwrap().omega_p;
        let p1 = scenario.user_channel(1, target).unwrap().omega_p;
        assert!(p1 < p0, "off-target user should be weaker: {p1} vs {p0}");
    }

    #[test]
    fn oma_schemes_coincide_with_even_split() {
        let scenario = two_user_scenario();
        let target = 20f64.to_radians();
        let f = sum_rate(&scenario, target, MaScheme::Fdma, 2000, 9).unwrap();
        let t = sum_rate(&scenario, target, MaScheme::Tdma, 2000, 9).unwrap();
        assert!(
            (f - t).abs() < 1e-12,
            "even-split FDMA and TDMA must coincide: {f} vs {t}"
        );
        // Off the even split they separate.
        let boosted = MultiAccessScenario {
            fdma_power: Some(0.8),
            ..scenario
        };
        let fb = sum_rate(&boosted, target, MaScheme::Fdma, 2000, 9).unwrap();
        assert!(fb > f, "extra per-band power must raise the FDMA rate");
    }

    #[test]
    fn element_weighting_breaks_angle_symmetry() {
        let weighted = two_user_scenario();
        let unweighted = MultiAccessScenario {
            element_weighted: false,
            ..two_user_scenario()
        };
        let g15 = weighted.element_gain(15f64.to_radians());
        let g33 = weighted.element_gain(33f64.to_radians());
        assert!(g15 > g33, "wider angle must see less element gain");
        assert_eq!(unweighted.element_gain(33f64.to_radians()), 1.0);
        // With weighting off and equal direct power, steering at either
        // user gives the same on-target channel.
        let c0 = unweighted.user_channel(0, 15f64.to_radians()).unwrap();
        let c1 = unweighted.user_channel(1, 33f64.to_radians()).unwrap();
        assert!(
            (c0.k_factor - c1.k_factor).abs() < 1e-12
                && (c0.omega_p - c1.omega_p).abs() < 1e-12,
            "unweighted on-target channels must match"
        );
    }

    #[test]
    fn scenario_validation_rejects_bad_allocations() {
        let mut s = two_user_scenario();
        s.allocations = vec![0.4, 0.6];
        assert!(s.validate().is_err(), "increasing allocations");
        s.allocations = vec![0.7, 0.4];
        assert!(s.validate().is_err(), "allocations exceed the budget");
        s.allocations = vec![0.6, 0.4];
        s.thresholds = vec![1.0, -2.0];
        assert!(s.validate().is_err(), "negative threshold");
    }
}
