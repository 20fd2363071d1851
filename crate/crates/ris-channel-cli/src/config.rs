//! Scenario files: TOML schemas for the five commands, with the conversions
//! from human-facing units (degrees, dB) to the radians and linear ratios
//! the library works in. Every block rejects unknown keys so a typo fails
//! loudly instead of silently falling back to a default.

use std::path::Path;

use serde::{Deserialize, Serialize};

use ris_channel::multiaccess::{MaUser, MultiAccessScenario};

use crate::Failure;

/// Reads and parses a scenario file. A missing or unreadable file is an I/O
/// failure; anything wrong with the contents is a configuration failure and
/// the serde diagnostic names the offending key.
pub fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

pub fn bad(field: &str, why: &str) -> Failure {
    Failure::Config(format!("{field}: {why}"))
}

// ─────────────────────────────────────────────────────────────────────────────
// pattern
// ─────────────────────────────────────────────────────────────────────────────

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternConfig {
    pub geometry: GeometryBlock,
    pub illumination: IlluminationBlock,
    pub phases: PhaseBlock,
    pub grid: GridBlock,
}

/// Surface layout. Lengths are wavelength-relative because the pattern only
/// depends on the electrical spacing; internally the wavelength is 1.
#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryBlock {
    pub m_x: usize,
    pub m_y: usize,
    pub p_x_over_lambda: f64,
    pub p_y_over_lambda: f64,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IlluminationBlock {
    pub theta_in_deg: f64,
}

/// How the per-element phases are chosen.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PhaseBlock {
    /// Steer the main beam toward a target angle, optionally through a
    /// uniform phase quantizer.
    CoPhase {
        theta_target_deg: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        quantization_bits: Option<u32>,
    },
    /// One phase on every element.
    Uniform { phi_deg: f64 },
    /// Explicit per-element phases, row-major over (m, n).
    Explicit { values_deg: Vec<f64> },
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub p: usize,
    pub q: usize,
}

// ─────────────────────────────────────────────────────────────────────────────
// envelope-dist
// ─────────────────────────────────────────────────────────────────────────────

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvelopeConfig {
    pub scenario: ScenarioBlock,
}

/// One stochastic-envelope scenario: an M-element surface with residual
/// phases spread over a span, against n_paths diffuse paths sized so the
/// specular-to-diffuse power ratio is k_0.
#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioBlock {
    pub m: usize,
    pub n_paths: usize,
    pub k_0: f64,
    pub residual_span_deg: f64,
}

// ─────────────────────────────────────────────────────────────────────────────
// keff-sweep
// ─────────────────────────────────────────────────────────────────────────────

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeffConfig {
    pub sweep: KeffSweepBlock,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeffSweepBlock {
    pub m_values: Vec<usize>,
    pub k_0_values: Vec<f64>,
    pub n_paths: usize,
    pub residual_span_deg: f64,
}

// ─────────────────────────────────────────────────────────────────────────────
// outage
// ─────────────────────────────────────────────────────────────────────────────

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutageConfig {
    pub outage: OutageBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiaccess: Option<MultiAccessBlock>,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutageBlock {
    pub kind: OutageKind,
    pub snr_db_start: f64,
    pub snr_db_stop: f64,
    pub snr_db_step: f64,
    /// Element counts, one curve each (random-phase and one-bit kinds).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub m_values: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_paths: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutageKind {
    /// Residual phases spread over a full turn; the envelope is Rayleigh.
    RandomPhase,
    /// One-bit quantization (half-turn residual span).
    OneBit,
    /// Per-user outage of the NOMA pair from the multiaccess block.
    Noma,
}

// ─────────────────────────────────────────────────────────────────────────────
// ma-sumrate (block shared with outage kind = "noma")
// ─────────────────────────────────────────────────────────────────────────────

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SumRateConfig {
    pub multiaccess: MultiAccessBlock,
    pub sweep: AngleSweepBlock,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleSweepBlock {
    pub start_deg: f64,
    pub stop_deg: f64,
    pub step_deg: f64,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiAccessBlock {
    pub m: usize,
    pub n_paths: usize,
    pub omega_r: f64,
    pub theta_in_deg: f64,
    pub p_x_over_lambda: f64,
    pub residual_span_deg: f64,
    pub snr_db: f64,
    /// Weight each user's specular power by the element factor at its angle.
    #[serde(default = "default_true")]
    pub element_weighted: bool,
    /// FDMA per-user power share; omitted means an equal split.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fdma_power_share: Option<f64>,
    /// NOMA power allocations by decode position, weakest user first.
    pub allocations: Vec<f64>,
    /// Per-position SINR thresholds.
    pub thresholds_db: Vec<f64>,
    pub users: Vec<UserBlock>,
    /// Steering angle for the outage command; the sum-rate sweep supplies
    /// its own angles and ignores this.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_angle_deg: Option<f64>,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserBlock {
    pub angle_deg: f64,
    pub omega_d: f64,
}

fn default_true() -> bool {
    true
}

impl MultiAccessBlock {
    /// Converts the block into the library scenario (radians, linear ratios)
    /// and lets the library invariants vet it.
    pub fn scenario(&self) -> Result<MultiAccessScenario, Failure> {
        let scenario = MultiAccessScenario {
            m: self.m,
            n_paths: self.n_paths,
            omega_r: self.omega_r,
            theta_in: self.theta_in_deg.to_radians(),
            p_x_over_lambda: self.p_x_over_lambda,
            delta: self.residual_span_deg.to_radians(),
            users: self
                .users
                .iter()
                .map(|u| MaUser {
                    angle: u.angle_deg.to_radians(),
                    omega_d: u.omega_d,
                })
                .collect(),
            allocations: self.allocations.clone(),
            thresholds: self.thresholds_db.iter().map(|db| db_to_linear(*db)).collect(),
            snr: db_to_linear(self.snr_db),
            fdma_power: self.fdma_power_share,
            element_weighted: self.element_weighted,
        };
        scenario
            .validate()
            .map_err(|e| Failure::Config(format!("multiaccess: {e}")))?;
        Ok(scenario)
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Inclusive arithmetic grid, tolerant of the usual floating-point shortfall
/// at the stop value.
pub fn grid(start: f64, stop: f64, step: f64, field: &str) -> Result<Vec<f64>, Failure> {
    if !step.is_finite() || step <= 0.0 {
        return Err(bad(field, "step must be positive"));
    }
    if !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(bad(field, "stop must be at or above start"));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + step * i as f64).collect())
}
