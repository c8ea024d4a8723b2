use thiserror::Error;

/// Process exit codes of the `heatlab` binary.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const ASSERTION_FAILED: i32 = 1;
    pub const CONFIG_ERROR: i32 = 2;
    pub const NUMERICAL_FAILURE: i32 = 3;
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config at `{key}`: {message}")]
    ConfigInvalid { key: String, message: String },
    #[error("numerical failure: {0}")]
    Numerical(#[from] heatlab_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        HarnessError::ConfigInvalid {
            key: key.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::ConfigInvalid { .. } | HarnessError::Io(_) => exit::CONFIG_ERROR,
            HarnessError::Numerical(_) => exit::NUMERICAL_FAILURE,
        }
    }
}

pub type HarnessResult<T> = Result<T, HarnessError>;
