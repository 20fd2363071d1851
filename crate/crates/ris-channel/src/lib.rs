//! Physics-based link model for reconfigurable intelligent surfaces (RIS).
//!
//! The crate covers the chain from per-element hardware state to link-level
//! statistics:
//!
//! * [`core_model`]: element reflection coefficients, phase quantization,
//!   and co-phasing configurations.
//! * [`radiation`]: scattered far-field patterns of the full surface, both
//!   by direct summation and through a 2-D inverse-DFT identity.
//! * [`montecarlo`]: seeded trial simulation of the received envelope under
//!   random residual phases.
//! * [`statistics`]: closed-form Rician/Nakagami parameter maps for the
//!   quantized surface, outage probabilities, and moment-based estimators.
//! * [`multiaccess`]: NOMA/FDMA/TDMA outage and sum-rate comparison on top
//!   of the per-user channel statistics.
//! * [`ks`]: Kolmogorov-Smirnov distances used by the simulation tests.

pub mod core_model;
pub mod error;
pub mod ks;
pub mod math;
pub mod montecarlo;
pub mod multiaccess;
pub mod radiation;
pub mod statistics;

pub use error::{Error, Result};
