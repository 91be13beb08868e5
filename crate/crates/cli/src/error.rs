use std::fmt;

/// Failure of a CLI run, mapped to the process exit status.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config file or output location (exit 2).
    Config(String),
    /// Error raised by the analysis library, with the point being evaluated.
    Core { context: String, source: csflab_core::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core { source, .. } if source.is_solver_failure() => 3,
            CliError::Core { .. } => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "invalid configuration: {msg}"),
            CliError::Core { context, source } => {
                let kind = if source.is_solver_failure() { "solver failure" } else { "invalid parameters" };
                if context.is_empty() {
                    write!(f, "{kind}: {source}")
                } else {
                    write!(f, "{kind} at {context}: {source}")
                }
            }
        }
    }
}

impl std::error::Error for CliError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            CliError::Core { source, .. } => Some(source),
            CliError::Config(_) => None,
        }
    }
}

impl From<csflab_core::Error> for CliError {
    fn from(e: csflab_core::Error) -> Self {
        CliError::Core { context: String::new(), source: e }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub(crate) fn at(context: impl Into<String>) -> impl FnOnce(csflab_core::Error) -> CliError {
    let context = context.into();
    move |source| CliError::Core { context, source }
}

pub(crate) fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}
