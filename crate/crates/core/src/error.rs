use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A caller-supplied value violates its documented range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The requested series does not converge for the supplied arguments.
    #[error("series diverges: {0}")]
    Divergent(String),

    /// Argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series used its whole term budget without meeting the tolerance.
    #[error("series did not converge within {max_terms} terms")]
    TermLimit { max_terms: usize },

    /// Enumeration would produce more items than the configured cap.
    #[error("enumeration cap of {cap} sequences exceeded")]
    CapExceeded { cap: usize },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

/// Rejects NaN, infinities and values `<= 0`.
pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::invalid(
            name,
            format!("must be finite and strictly positive, got {value}"),
        ))
    }
}
