//! Element-level hardware model: surface geometry, reflection coefficients,
//! phase quantization, and co-phasing configurations.
//!
//! Every element is a terminated scatterer whose reflection coefficient
//! follows from its load and line impedances. A phase shifter with B control
//! bits realizes the levels {0, delta, ..., (2^B - 1) delta}, delta =
//! 2 pi / 2^B; the continuous limit keeps the commanded phase exactly.

use crate::error::{Error, Result};
use crate::math::{wrap_to_2pi, wrap_to_pi};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, TAU};

/// Rectangular surface: element counts along x and y, spacings, and the
/// carrier wavelength that fixes the wavenumber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RisGeometry {
    pub m_x: usize,
    pub m_y: usize,
    pub p_x: f64,
    pub p_y: f64,
    pub lambda: f64,
}

impl RisGeometry {
    pub fn new(m_x: usize, m_y: usize, p_x: f64, p_y: f64, lambda: f64) -> Result<Self> {
        if m_x == 0 || m_y == 0 {
            return Err(Error::Geometry(format!(
                "element counts must be positive, got {m_x} x {m_y}"
            )));
        }
        if !(p_x > 0.0 && p_y > 0.0) {
            return Err(Error::Geometry(format!(
                "element spacings must be positive, got p_x = {p_x}, p_y = {p_y}"
            )));
        }
        if lambda <= 0.0 || lambda.is_nan() {
            return Err(Error::Geometry(format!(
                "wavelength must be positive, got {lambda}"
            )));
        }
        Ok(Self {
            m_x,
            m_y,
            p_x,
            p_y,
            lambda,
        })
    }

    /// Common special case: half-wavelength element pitch in both directions.
    pub fn half_wavelength(m_x: usize, m_y: usize, lambda: f64) -> Result<Self> {
        Self::new(m_x, m_y, lambda / 2.0, lambda / 2.0, lambda)
    }

    /// Free-space wavenumber 2 pi / lambda.
    pub fn k_0(&self) -> f64 {
        TAU / self.lambda
    }

    pub fn elements(&self) -> usize {
        self.m_x * self.m_y
    }
}

/// Plane-wave illumination and observation of one reflected link:
/// incidence and departure angles (radians, measured from the surface
/// normal) and the two hop distances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub theta_in: f64,
    pub theta_out: f64,
    pub d_1: f64,
    pub d_2: f64,
}

impl LinkGeometry {
    pub fn new(theta_in: f64, theta_out: f64, d_1: f64, d_2: f64) -> Result<Self> {
        for (name, theta) in [("theta_in", theta_in), ("theta_out", theta_out)] {
            if !theta.is_finite() || theta.abs() >= FRAC_PI_2 {
                return Err(Error::Geometry(format!(
                    "{name} must lie in (-pi/2, pi/2), got {theta}"
                )));
            }
        }
        if !(d_1 > 0.0 && d_2 > 0.0) {
            return Err(Error::Geometry(format!(
                "hop distances must be positive, got d_1 = {d_1}, d_2 = {d_2}"
            )));
        }
        Ok(Self {
            theta_in,
            theta_out,
            d_1,
            d_2,
        })
    }

    /// sin(theta_out) - sin(theta_in): the per-unit-length phase slope of the
    /// scattered path across the aperture.
    pub fn direction_shift(&self) -> f64 {
        self.theta_out.sin() - self.theta_in.sin()
    }
}

/// Reflection coefficient of a terminated element,
///
/// ```text
///     r = (z_l - z_0) / (z_l + z_0),
/// ```
///
/// for load impedance `z_l` against line impedance `z_0`. A purely reactive
/// load on a lossless line gives |r| = 1: the phase-shifter regime.
pub fn reflection_coefficient(z_l: Complex64, z_0: Complex64) -> Result<Complex64> {
    let denom = z_l + z_0;
    let scale = z_l.norm() + z_0.norm();
    if denom.norm() <= 1e-12 * scale.max(1e-300) {
        return Err(Error::DegenerateImpedance(denom.norm()));
    }
    Ok((z_l - z_0) / denom)
}

/// Phase control resolution of the surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantization {
    /// Ideal phase shifters; commanded phases are kept exactly.
    Continuous,
    /// B-bit shifters with uniform level spacing 2 pi / 2^B.
    Discrete { bits: u32 },
}

impl Quantization {
    /// Level spacing delta, or None in the continuous case.
    pub fn step(&self) -> Option<f64> {
        match self {
            Quantization::Continuous => None,
            Quantization::Discrete { bits } => Some(TAU / 2f64.powi(*bits as i32)),
        }
    }

    /// Snap a phase onto the realizable grid (identity when continuous,
    /// modulo wrapping into [0, 2 pi)).
    pub fn apply(&self, phi: f64) -> f64 {
        match self {
            Quantization::Continuous => wrap_to_2pi(phi),
            Quantization::Discrete { bits } => quantize_phase(phi, *bits),
        }
    }
}

/// Round a phase to the nearest B-bit level. The result lies on the grid
/// {0, delta, ..., 2 pi - delta}, delta = 2 pi / 2^B, and ties round toward
/// the lower level so that each level owns a half-open cell of width delta.
/// B = 0 collapses everything onto the single level 0.
pub fn quantize_phase(phi: f64, bits: u32) -> f64 {
    assert!(bits <= 53, "phase quantizer supports at most 53 bits, got {bits}");
    let levels = 2f64.powi(bits as i32);
    let step = TAU / levels;
    let t = (wrap_to_2pi(phi) / step - 0.5).ceil().max(0.0);
    if t >= levels {
        0.0
    } else {
        t * step
    }
}

/// Signed quantization error, quantized minus commanded, wrapped to
/// (-pi, pi]. For a B >= 1 quantizer this lands in [-delta/2, delta/2).
pub fn residual_phase(phi: f64, bits: u32) -> f64 {
    wrap_to_pi(quantize_phase(phi, bits) - phi)
}

/// Per-element phase commands for the whole surface, stored row-major with
/// the x index as the row: entry (m, n) sits at m * m_y + n. All values are
/// wrapped into [0, 2 pi).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseConfig {
    phases: Vec<f64>,
    m_x: usize,
    m_y: usize,
}

impl PhaseConfig {
    pub fn new(phases: Vec<f64>, m_x: usize, m_y: usize) -> Result<Self> {
        if phases.len() != m_x * m_y {
            return Err(Error::Dimension(format!(
                "expected {m_x} x {m_y} = {} phases, got {}",
                m_x * m_y,
                phases.len()
            )));
        }
        if let Some(bad) = phases.iter().find(|p| !p.is_finite()) {
            return Err(Error::Config(format!("non-finite phase entry {bad}")));
        }
        Ok(Self {
            phases: phases.into_iter().map(wrap_to_2pi).collect(),
            m_x,
            m_y,
        })
    }

    /// Every element commanded to the same phase.
    pub fn uniform(phi: f64, m_x: usize, m_y: usize) -> Result<Self> {
        Self::new(vec![phi; m_x * m_y], m_x, m_y)
    }

    pub fn m_x(&self) -> usize {
        self.m_x
    }

    pub fn m_y(&self) -> usize {
        self.m_y
    }

    pub fn phase(&self, m: usize, n: usize) -> f64 {
        self.phases[m * self.m_y + n]
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// The per-row phase profile, when the configuration only steers in the
    /// x plane: Some(profile) iff every row is constant across n.
    pub fn row_profile(&self) -> Option<Vec<f64>> {
        let mut profile = Vec::with_capacity(self.m_x);
        for m in 0..self.m_x {
            let first = self.phase(m, 0);
            for n in 1..self.m_y {
                if self.phase(m, n) != first {
                    return None;
                }
            }
            profile.push(first);
        }
        Some(profile)
    }

    /// Check that every entry sits on the B-bit grid (within `tol` radians).
    pub fn check_on_grid(&self, bits: u32, tol: f64) -> Result<()> {
        for (idx, &phi) in self.phases.iter().enumerate() {
            let snapped = quantize_phase(phi, bits);
            if wrap_to_pi(phi - snapped).abs() > tol {
                return Err(Error::Config(format!(
                    "phase {phi} at flat index {idx} is off the {bits}-bit grid by {}",
                    wrap_to_pi(phi - snapped).abs()
                )));
            }
        }
        Ok(())
    }
}

/// Build the configuration that co-phases the surface toward departure angle
/// `theta_target` under incidence `theta_in`: a linear profile
///
/// ```text
///     phi_m = k_0 p_x (sin theta_target - sin theta_in) m
/// ```
///
/// constant along y, wrapped into [0, 2 pi), and snapped onto the quantizer
/// grid. At theta_target the per-element contributions then add in phase, up
/// to the quantization residuals.
pub fn co_phase_config(
    geometry: &RisGeometry,
    theta_in: f64,
    theta_target: f64,
    quantization: Quantization,
) -> Result<PhaseConfig> {
    for (name, theta) in [("theta_in", theta_in), ("theta_target", theta_target)] {
        if !theta.is_finite() || theta.abs() >= FRAC_PI_2 {
            return Err(Error::Config(format!(
                "{name} must lie in (-pi/2, pi/2), got {theta}"
            )));
        }
    }
    let slope = geometry.k_0() * geometry.p_x * (theta_target.sin() - theta_in.sin());
    let mut phases = Vec::with_capacity(geometry.elements());
    for m in 0..geometry.m_x {
        let phi = quantization.apply(slope * m as f64);
        for _ in 0..geometry.m_y {
            phases.push(phi);
        }
    }
    PhaseConfig::new(phases, geometry.m_x, geometry.m_y)
}
