//! Library side of the `gou` command: spec parsing, the commands, and the
//! acceptance criteria behind `gou validate`.

pub mod commands;
pub mod criteria;
pub mod error;
pub mod hash;
pub mod spec;

pub use error::{CliError, EXIT_INPUT, EXIT_OK, EXIT_UNDETERMINED};
pub use spec::{Preset, ProcessSpec};
