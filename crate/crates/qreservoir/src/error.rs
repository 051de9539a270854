use thiserror::Error;

/// Errors produced by substrate construction, sequence driving and training.
#[derive(Debug, Error)]
pub enum QrError {
    /// A scalar argument fell outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),

    /// Matrix or vector shapes do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A computation produced non-finite values or a decomposition failed.
    /// `step` names the offending injection step when known.
    #[error("numerical instability{}: {msg}", step.map(|s| format!(" at step {s}")).unwrap_or_default())]
    Numerical { step: Option<usize>, msg: String },

    /// Experiment configuration rejected; `line` is 1-based.
    #[error("config error (line {line}): {msg}")]
    Config { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl QrError {
    pub fn numerical(msg: impl Into<String>) -> Self {
        QrError::Numerical { step: None, msg: msg.into() }
    }

    pub fn numerical_at(step: usize, msg: impl Into<String>) -> Self {
        QrError::Numerical { step: Some(step), msg: msg.into() }
    }

    /// Process exit code for the CLI: 1 config, 2 numerical, 3 i/o.
    pub fn exit_code(&self) -> i32 {
        match self {
            QrError::Config { .. } | QrError::Domain(_) | QrError::Dimension(_) => 1,
            QrError::Numerical { .. } => 2,
            QrError::Io(_) => 3,
        }
    }
}

impl From<ndarray_linalg::error::LinalgError> for QrError {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        QrError::numerical(format!("linear algebra failure: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, QrError>;
