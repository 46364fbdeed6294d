use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const VALIDATION: u8 = 1;
    pub const CHECK_FAILED: u8 = 2;
    pub const RESOURCE_CAP: u8 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{origin}{}: {message}", line.map(|l| format!(":{l}")).unwrap_or_default())]
    Invalid {
        origin: String,
        line: Option<usize>,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] wiretap_core::Error),

    #[error("{failed} of {total} checks failed")]
    ChecksFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(wiretap_core::Error::CapExceeded { .. }) => exit::RESOURCE_CAP,
            CliError::ChecksFailed { .. } => exit::CHECK_FAILED,
            _ => exit::VALIDATION,
        }
    }
}
