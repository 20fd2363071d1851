use thiserror::Error;

/// Errors produced by model construction and evaluation.
///
/// Every constructor that validates physical or statistical preconditions
/// reports failures through this type; numerical routines themselves are
/// total over their documented domains.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Geometry parameters out of range (non-positive spacing, zero counts, ...).
    #[error("invalid geometry: {0}")]
    Geometry(String),

    /// A configuration value violates a documented precondition.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Load and line impedances nearly cancel; the reflection coefficient
    /// diverges.
    #[error("degenerate impedance: |z_l + z_0| = {0:.3e} is below tolerance")]
    DegenerateImpedance(f64),

    /// An input slice or matrix does not have the advertised shape.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Statistical estimation rejected its input sample.
    #[error("fit rejected: {0}")]
    Fit(String),

    /// A multi-access scenario is inconsistent (allocations, thresholds,
    /// decode order).
    #[error("invalid multi-access scenario: {0}")]
    Scenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;
