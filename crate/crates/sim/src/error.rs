use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{system} state became non-finite at step {step}")]
    NonFinite { system: &'static str, step: usize },
    #[error("configuration parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Series(#[from] cmc::Error),
}

pub type Result<T> = std::result::Result<T, SimError>;

macro_rules! bad_config {
    ($($arg:tt)*) => {
        return Err($crate::error::SimError::InvalidConfig(format!($($arg)*)))
    };
}
pub(crate) use bad_config;
