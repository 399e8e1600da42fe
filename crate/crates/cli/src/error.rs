use gou_core::GouError;
use thiserror::Error;

/// Everything that ends a command early, mapped onto the exit-code contract.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or inconsistent input: a bad spec, bad flags, an unusable
    /// output directory, or an estimator precondition.
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Undetermined(String),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_UNDETERMINED: i32 = 2;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Undetermined(_) => EXIT_UNDETERMINED,
        }
    }
}

impl From<GouError> for CliError {
    fn from(e: GouError) -> Self {
        if e.is_undetermined() {
            CliError::Undetermined(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}
