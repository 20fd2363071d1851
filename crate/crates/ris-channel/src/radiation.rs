//! Scattered far-field of the full surface.
//!
//! Two evaluation paths cover the two common questions:
//!
//! * [`ris_pattern`] renders the whole direction-cosine grid at once by a
//!   zero-padded 2-D inverse DFT of the aperture field, for beam maps and
//!   peak hunting.
//! * [`ris_envelope_2d`] evaluates a single observation direction of one
//!   link, with the element amplitude (aperture area, projection, spreading
//!   loss) carried explicitly, matching phasor-by-phasor what the Monte
//!   Carlo and statistics layers model.
//!
//! Convention: the incident plane wave accumulates phase +k_0 sin(theta_in)
//! per unit of x across the aperture, and radiation toward direction cosine
//! u strips k_0 u per unit of x, so a linear command profile of slope
//! k_0 p_x (sin theta_t - sin theta_in) steers the beam to theta_t and the
//! uniform surface scatters specularly.

use crate::core_model::{LinkGeometry, PhaseConfig, RisGeometry};
use crate::error::{Error, Result};
use crate::math::sinc;
use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

// ─────────────────────────────────────────────────────────────────────────────
// Aperture field
// ─────────────────────────────────────────────────────────────────────────────

/// Complex field on the aperture just after reflection: per element,
/// F(m, n) = r(m, n) * exp(+j k_0 sin(theta_in) m p_x). Row-major with the
/// x index as the row.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldMatrix {
    values: Vec<Complex64>,
    m_x: usize,
    m_y: usize,
}

impl FieldMatrix {
    /// Assemble from arbitrary per-element reflection coefficients, row-major.
    pub fn from_elements(
        geometry: &RisGeometry,
        theta_in: f64,
        reflection: &[Complex64],
    ) -> Result<Self> {
        if reflection.len() != geometry.elements() {
            return Err(Error::Dimension(format!(
                "expected {} reflection coefficients, got {}",
                geometry.elements(),
                reflection.len()
            )));
        }
        if !theta_in.is_finite() || theta_in.abs() >= PI / 2.0 {
            return Err(Error::Config(format!(
                "theta_in must lie in (-pi/2, pi/2), got {theta_in}"
            )));
        }
        let slope = geometry.k_0() * geometry.p_x * theta_in.sin();
        let mut values = Vec::with_capacity(reflection.len());
        for m in 0..geometry.m_x {
            let illum = Complex64::from_polar(1.0, slope * m as f64);
            for n in 0..geometry.m_y {
                values.push(reflection[m * geometry.m_y + n] * illum);
            }
        }
        Ok(Self {
            values,
            m_x: geometry.m_x,
            m_y: geometry.m_y,
        })
    }

    /// Unit-magnitude elements carrying a phase configuration: the
    /// phase-shifter regime.
    pub fn from_phases(
        geometry: &RisGeometry,
        theta_in: f64,
        phases: &PhaseConfig,
    ) -> Result<Self> {
        if phases.m_x() != geometry.m_x || phases.m_y() != geometry.m_y {
            return Err(Error::Dimension(format!(
                "phase configuration is {} x {}, geometry is {} x {}",
                phases.m_x(),
                phases.m_y(),
                geometry.m_x,
                geometry.m_y
            )));
        }
        let reflection: Vec<Complex64> = phases
            .phases()
            .iter()
            .map(|&p| Complex64::from_polar(1.0, p))
            .collect();
        Self::from_elements(geometry, theta_in, &reflection)
    }

    pub fn m_x(&self) -> usize {
        self.m_x
    }

    pub fn m_y(&self) -> usize {
        self.m_y
    }

    pub fn value(&self, m: usize, n: usize) -> Complex64 {
        self.values[m * self.m_y + n]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

// ─────────────────────────────────────────────────────────────────────────────
// 2-D inverse DFT
// ─────────────────────────────────────────────────────────────────────────────

/// Normalized 2-D inverse DFT of a row-major m_x by m_y grid:
///
/// ```text
///     out(p, q) = (1 / (m_x m_y)) sum_{m, n} in(m, n)
///                 exp(+j 2 pi (m p / m_x + n q / m_y)).
/// ```
///
/// Evaluated row-column in O(m_x m_y (m_x + m_y)); the grids this crate
/// renders are far too small to justify an FFT dependency.
pub fn idft2(values: &[Complex64], m_x: usize, m_y: usize) -> Result<Vec<Complex64>> {
    if m_x == 0 || m_y == 0 {
        return Err(Error::Dimension("idft2 grid must be non-empty".into()));
    }
    if values.len() != m_x * m_y {
        return Err(Error::Dimension(format!(
            "expected {} grid values, got {}",
            m_x * m_y,
            values.len()
        )));
    }
    // Transform along n for every row m.
    let col_tw = twiddles(m_y);
    let mut rows = vec![Complex64::new(0.0, 0.0); m_x * m_y];
    for m in 0..m_x {
        for q in 0..m_y {
            let mut acc = Complex64::new(0.0, 0.0);
            for n in 0..m_y {
                acc += values[m * m_y + n] * col_tw[(n * q) % m_y];
            }
            rows[m * m_y + q] = acc;
        }
    }
    // Transform along m for every column q, applying the normalization once.
    let row_tw = twiddles(m_x);
    let norm = 1.0 / (m_x as f64 * m_y as f64);
    let mut out = vec![Complex64::new(0.0, 0.0); m_x * m_y];
    for q in 0..m_y {
        for p in 0..m_x {
            let mut acc = Complex64::new(0.0, 0.0);
            for m in 0..m_x {
                acc += rows[m * m_y + q] * row_tw[(m * p) % m_x];
            }
            out[p * m_y + q] = acc * norm;
        }
    }
    Ok(out)
}

/// exp(+j 2 pi k / n) for k = 0..n.
fn twiddles(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / n as f64))
        .collect()
}

// ─────────────────────────────────────────────────────────────────────────────
// Full-grid pattern
// ─────────────────────────────────────────────────────────────────────────────

/// Scattered pattern sampled on a direction-cosine grid.
///
/// Grid index p maps to u = 2 pi p~ / (P p_x k_0) with p~ = p for p <= P/2
/// and p~ = p - P beyond (and likewise q to v), so low indices cover the
/// forward directions and the upper half aliases to negative cosines.
/// Entries with u^2 + v^2 > 1 do not correspond to propagating directions;
/// they are kept (the transform produces them anyway) but flagged.
#[derive(Debug, Clone)]
pub struct PatternGrid {
    values: Vec<Complex64>,
    us: Vec<f64>,
    vs: Vec<f64>,
}

impl PatternGrid {
    pub fn grid_p(&self) -> usize {
        self.us.len()
    }

    pub fn grid_q(&self) -> usize {
        self.vs.len()
    }

    pub fn value(&self, p: usize, q: usize) -> Complex64 {
        self.values[p * self.vs.len() + q]
    }

    pub fn magnitude(&self, p: usize, q: usize) -> f64 {
        self.value(p, q).norm()
    }

    /// Direction cosine along x at row p.
    pub fn u(&self, p: usize) -> f64 {
        self.us[p]
    }

    /// Direction cosine along y at column q.
    pub fn v(&self, q: usize) -> f64 {
        self.vs[q]
    }

    /// Whether (p, q) is a propagating direction (u^2 + v^2 <= 1).
    pub fn is_physical(&self, p: usize, q: usize) -> bool {
        let (u, v) = (self.us[p], self.vs[q]);
        u * u + v * v <= 1.0
    }

    /// Elevation angle asin(u) for a row in the principal (v = 0) cut, or
    /// None when the row is evanescent.
    pub fn cut_angle(&self, p: usize) -> Option<f64> {
        let u = self.us[p];
        (u.abs() <= 1.0).then(|| u.asin())
    }

    /// Strongest propagating entry, as (p, q, magnitude).
    pub fn physical_peak(&self) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for p in 0..self.us.len() {
            for q in 0..self.vs.len() {
                if !self.is_physical(p, q) {
                    continue;
                }
                let mag = self.magnitude(p, q);
                if best.is_none_or(|(_, _, b)| mag > b) {
                    best = Some((p, q, mag));
                }
            }
        }
        best
    }
}

/// Render the scattered pattern of an aperture field on a `grid_p` by
/// `grid_q` direction grid (each at least the aperture size; larger grids
/// zero-pad and refine the sampling).
///
/// At grid direction (u, v) the value is
///
/// ```text
///     E(u, v) = exp(+j (k_0/2) (u (m_x - 1) p_x + v (m_y - 1) p_y))
///               * p_x p_y sinc(k_0 u p_x / 2) sinc(k_0 v p_y / 2)
///               * sum_{m, n} F(m, n) exp(-j k_0 (u m p_x + v n p_y)),
/// ```
///
/// the element factor times the array sum, re-phased to the aperture
/// center. The array sum is an inverse DFT of the conjugated field, so the
/// whole grid costs one `idft2`.
pub fn ris_pattern(
    field: &FieldMatrix,
    geometry: &RisGeometry,
    grid_p: usize,
    grid_q: usize,
) -> Result<PatternGrid> {
    if field.m_x() != geometry.m_x || field.m_y() != geometry.m_y {
        return Err(Error::Dimension(format!(
            "field is {} x {}, geometry is {} x {}",
            field.m_x(),
            field.m_y(),
            geometry.m_x,
            geometry.m_y
        )));
    }
    if grid_p < geometry.m_x || grid_q < geometry.m_y {
        return Err(Error::Config(format!(
            "pattern grid {grid_p} x {grid_q} cannot be smaller than the aperture {} x {}",
            geometry.m_x, geometry.m_y
        )));
    }

    // sum F e^{-j...} = conj( (1/PQ) sum conj(F) e^{+j...} ) * P Q.
    let mut padded = vec![Complex64::new(0.0, 0.0); grid_p * grid_q];
    for m in 0..geometry.m_x {
        for n in 0..geometry.m_y {
            padded[m * grid_q + n] = field.value(m, n).conj();
        }
    }
    let transform = idft2(&padded, grid_p, grid_q)?;

    let k_0 = geometry.k_0();
    let us: Vec<f64> = (0..grid_p)
        .map(|p| direction_cosine(p, grid_p, geometry.p_x, k_0))
        .collect();
    let vs: Vec<f64> = (0..grid_q)
        .map(|q| direction_cosine(q, grid_q, geometry.p_y, k_0))
        .collect();

    let cells = (grid_p * grid_q) as f64;
    let area = geometry.p_x * geometry.p_y;
    let mut values = Vec::with_capacity(grid_p * grid_q);
    for (p, &u) in us.iter().enumerate() {
        let center_x = 0.5 * k_0 * u * (geometry.m_x - 1) as f64 * geometry.p_x;
        let taper_x = sinc(0.5 * k_0 * u * geometry.p_x);
        for (q, &v) in vs.iter().enumerate() {
            let center_y = 0.5 * k_0 * v * (geometry.m_y - 1) as f64 * geometry.p_y;
            let taper_y = sinc(0.5 * k_0 * v * geometry.p_y);
            let array_sum = transform[p * grid_q + q].conj() * cells;
            let centering = Complex64::from_polar(1.0, center_x + center_y);
            values.push(centering * (area * taper_x * taper_y) * array_sum);
        }
    }
    Ok(PatternGrid { values, us, vs })
}

/// Direction cosine of grid index p on an n-point grid with pitch `pitch`:
/// 2 pi p~ / (n pitch k_0), indices past n/2 aliased to the negative side.
fn direction_cosine(p: usize, n: usize, pitch: f64, k_0: f64) -> f64 {
    let signed = if p <= n / 2 {
        p as f64
    } else {
        p as f64 - n as f64
    };
    TAU * signed / (n as f64 * pitch * k_0)
}

// ─────────────────────────────────────────────────────────────────────────────
// Single-direction link envelope
// ─────────────────────────────────────────────────────────────────────────────

/// Scalar amplitude common to every element of one link: incident field
/// strength, far-field spreading, aperture area, and the departure
/// projection. Split out so tests and normalizations can switch the pieces
/// off individually.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementAmplitude {
    /// Incident field strength |E_0|.
    pub field_scale: f64,
    /// Spreading factor k_0 / (4 pi d_1 d_2).
    pub fraunhofer: f64,
    /// Element aperture area p_x p_y.
    pub area: f64,
    /// Departure projection cos(theta_out).
    pub leaning: f64,
}

impl ElementAmplitude {
    /// All factors set to one: pure array behavior.
    pub fn unit() -> Self {
        Self {
            field_scale: 1.0,
            fraunhofer: 1.0,
            area: 1.0,
            leaning: 1.0,
        }
    }

    /// The physical amplitude of a link through `geometry`.
    pub fn from_link(field_scale: f64, geometry: &RisGeometry, link: &LinkGeometry) -> Result<Self> {
        if !(field_scale.is_finite() && field_scale >= 0.0) {
            return Err(Error::Config(format!(
                "field scale must be finite and non-negative, got {field_scale}"
            )));
        }
        Ok(Self {
            field_scale,
            fraunhofer: geometry.k_0() / (4.0 * PI * link.d_1 * link.d_2),
            area: geometry.p_x * geometry.p_y,
            leaning: link.theta_out.cos(),
        })
    }

    /// Combined per-element amplitude.
    pub fn c_0(&self) -> f64 {
        self.field_scale * self.fraunhofer * self.area * self.leaning
    }
}

/// Received complex envelope of one link through the surface:
///
/// ```text
///     E = c_0 sinc(k_0 u' p_x / 2) sum_{m, n} exp(j (theta_0 - eps m + phi(m, n))),
/// ```
///
/// with u' = sin(theta_out) - sin(theta_in), eps = k_0 u' p_x, and the
/// common phase theta_0 = k_0 u' (m_x - 1) p_x / 2 + k_0 (d_1 + d_2).
/// Steering is modeled in the x plane only, so the y sum is coherent.
pub fn ris_envelope_2d(
    geometry: &RisGeometry,
    link: &LinkGeometry,
    phases: &PhaseConfig,
    amplitude: &ElementAmplitude,
) -> Result<Complex64> {
    if phases.m_x() != geometry.m_x || phases.m_y() != geometry.m_y {
        return Err(Error::Dimension(format!(
            "phase configuration is {} x {}, geometry is {} x {}",
            phases.m_x(),
            phases.m_y(),
            geometry.m_x,
            geometry.m_y
        )));
    }
    let c_0 = amplitude.c_0();
    if !c_0.is_finite() || c_0 < 0.0 {
        return Err(Error::Config(format!(
            "element amplitude must be finite and non-negative, got {c_0}"
        )));
    }
    let k_0 = geometry.k_0();
    let u_shift = link.direction_shift();
    let eps = k_0 * u_shift * geometry.p_x;
    let theta_0 =
        0.5 * eps * (geometry.m_x - 1) as f64 + k_0 * (link.d_1 + link.d_2);
    let taper = sinc(0.5 * eps);

    let mut sum = Complex64::new(0.0, 0.0);
    for m in 0..geometry.m_x {
        let row_phase = theta_0 - eps * m as f64;
        for n in 0..geometry.m_y {
            sum += Complex64::from_polar(1.0, row_phase + phases.phase(m, n));
        }
    }
    Ok(sum * (c_0 * taper))
}

/// Magnitude of a unit-phasor sum with the given phase errors: the length of
/// the chain in the vector diagram. With all residuals zero this is the
/// element count; random residuals shorten it.
pub fn vector_graph_magnitude(residuals: &[f64]) -> f64 {
    residuals
        .iter()
        .map(|&r| Complex64::from_polar(1.0, r))
        .sum::<Complex64>()
        .norm()
}
