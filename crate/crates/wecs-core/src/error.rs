use thiserror::Error;

/// Everything that can go wrong across the crate.
///
/// Errors split into two families: bad input (parameters, scenario keys,
/// malformed analysis windows) and numerical failure (divergence, no
/// equilibrium, degenerate signals). [`Error::is_numerical`] tells the two
/// apart so callers can map them to distinct exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A scenario file failed validation; `key` names the offending entry.
    #[error("scenario key `{key}`: {reason}")]
    Scenario { key: String, reason: String },

    /// The coefficient fit has no usable solution for these exponents.
    #[error("degenerate coefficient fit: {0}")]
    DegenerateFit(String),

    /// A harmonic-analysis window that cannot be evaluated as requested.
    #[error("harmonic analysis: {0}")]
    HarmonicWindow(String),

    /// The fundamental is too small to normalise a distortion ratio against.
    #[error("harmonic analysis: fundamental amplitude {amplitude} is below {floor} of the signal scale")]
    DegenerateFundamental { amplitude: f64, floor: f64 },

    /// Integration produced a non-finite value.
    #[error("non-finite value in channel `{channel}` at t = {t} s")]
    NonFinite { channel: String, t: f64 },

    /// The right-hand side became unevaluable mid-run.
    #[error("simulation diverged at t = {t} s: {detail}")]
    Diverged { t: f64, detail: String },

    #[error("no equilibrium: {0}")]
    NoEquilibrium(String),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite { .. }
                | Error::Diverged { .. }
                | Error::NoEquilibrium(_)
                | Error::DegenerateFundamental { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

/// Shorthand guard: `name` must be finite and strictly positive.
pub(crate) fn require_positive(value: f64, name: &'static str) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("must be positive and finite, got {value}")))
    }
}

/// Shorthand guard: `name` must be finite and non-negative.
pub(crate) fn require_non_negative(value: f64, name: &'static str) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("must be non-negative and finite, got {value}")))
    }
}
