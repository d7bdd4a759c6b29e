use aplab_core::LabError;
use thiserror::Error;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config or subject; nothing was computed.
    #[error("usage: {0}")]
    Usage(String),
    #[error("runtime: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

/// Errors while loading inputs are usage errors; the command bodies map
/// their own failures with [`runtime`].
impl From<LabError> for CliError {
    fn from(e: LabError) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

pub trait RuntimeContext<T> {
    fn at_runtime(self) -> Result<T, CliError>;
}

impl<T, E: std::fmt::Display> RuntimeContext<T> for Result<T, E> {
    fn at_runtime(self) -> Result<T, CliError> {
        self.map_err(runtime)
    }
}
