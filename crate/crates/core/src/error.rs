use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    /// A parameter violates its documented range.
    #[error("invalid parameter `{key}`: {reason}")]
    InvalidParam { key: &'static str, reason: String },

    /// An argument lies outside the domain of the formula being evaluated.
    #[error("domain error in {op}: {reason}")]
    Domain { op: &'static str, reason: String },
}

impl ModelError {
    pub(crate) fn invalid(key: &'static str, reason: impl Into<String>) -> Self {
        ModelError::InvalidParam {
            key,
            reason: reason.into(),
        }
    }

    pub(crate) fn domain(op: &'static str, reason: impl Into<String>) -> Self {
        ModelError::Domain {
            op,
            reason: reason.into(),
        }
    }
}
