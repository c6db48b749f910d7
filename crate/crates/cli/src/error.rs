use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error in `{field}`: {message}")]
    Parse { field: String, message: String },

    #[error("invalid value for `{field}`: {message}")]
    Domain { field: String, message: String },

    #[error("truncation failure for `{field}`: {message}")]
    Truncation { field: String, message: String },

    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Parse { field: field.into(), message: message.into() }
    }

    pub fn domain(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Domain { field: field.into(), message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } => 2,
            CliError::Domain { .. } => 3,
            CliError::Truncation { .. } => 4,
            CliError::Io(_) => 1,
        }
    }

    /// Maps a library error onto the config field that produced it.
    pub fn from_engine(field: &str, err: kerr_mzi::Error) -> Self {
        match err {
            kerr_mzi::Error::Truncation { .. } => CliError::Truncation { field: field.into(), message: err.to_string() },
            kerr_mzi::Error::InvalidParameter { name, .. } => {
                CliError::Domain { field: format!("{field}.{name}"), message: err.to_string() }
            }
            other => CliError::Domain { field: field.into(), message: other.to_string() },
        }
    }
}
