use thiserror::Error;

#[derive(Debug, Error)]
pub enum ForgeError {
    /// Input data is not well formed (not a permutation, bad ids, mismatched sizes).
    #[error("structural error: {0}")]
    Structural(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A computation would exceed a configured cap; never reported as success.
    #[error("infeasible: {what} needs {needed}, cap is {cap}")]
    Infeasible {
        what: String,
        needed: String,
        cap: String,
    },
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("config error: {0}")]
    Config(String),
}

impl ForgeError {
    pub fn infeasible(what: impl Into<String>, needed: impl ToString, cap: impl ToString) -> Self {
        ForgeError::Infeasible {
            what: what.into(),
            needed: needed.to_string(),
            cap: cap.to_string(),
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, ForgeError::Infeasible { .. })
    }
}

pub type Result<T> = std::result::Result<T, ForgeError>;
