use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GouError {
    /// A numerical computation could not decide its answer within the declared tolerance.
    #[error("undetermined: {what} (residual bound {residual:e})")]
    Undetermined { what: String, residual: f64 },

    #[error("process does not have finite variation: {0}")]
    NotFiniteVariation(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("not supported: {0}")]
    NotSupported(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// `+inf - inf` or an equivalent indeterminate form.
    #[error("indeterminate form: {0}")]
    Indeterminate(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl GouError {
    pub fn undetermined(what: impl Into<String>, residual: f64) -> Self {
        GouError::Undetermined {
            what: what.into(),
            residual,
        }
    }

    pub fn is_undetermined(&self) -> bool {
        matches!(self, GouError::Undetermined { .. })
    }
}

pub type Result<T> = std::result::Result<T, GouError>;
