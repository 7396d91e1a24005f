use thiserror::Error;

/// Errors shared by all analytic and statistical routines.
#[derive(Debug, Error)]
pub enum ModelError {
    /// An input fell outside the physical domain of the model.
    #[error("domain error: {0}")]
    Domain(String),

    /// A ratio denominator vanished (e.g. both channels blocked).
    #[error("degenerate denominator: {0}")]
    DegenerateDenominator(String),

    /// A run configuration failed validation before any computation.
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, ModelError>;
