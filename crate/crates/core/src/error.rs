use thiserror::Error;

/// Errors produced by parameter validation, the rate models and the harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid value {value} for `{field}`: {reason}")]
    InvalidParameter {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("scheme {scheme} needs a {expected} memory")]
    MemoryMismatch {
        scheme: &'static str,
        expected: &'static str,
    },

    #[error("unbounded trial budget: per-trial latch probability is zero")]
    UnboundedTrialBudget,

    #[error("coherence budget is only defined for AFC schemes, got {0}")]
    NotApplicable(&'static str),

    #[error("round needs {used:e} s but spin coherence allows only {limit:e} s")]
    Infeasible { used: f64, limit: f64 },

    #[error("rate of the reference configuration is zero")]
    ZeroRate,

    #[error("ratio requires both configurations to share one link")]
    LinkMismatch,

    #[error("imperfect heralding needs p_pass * p_AFC > 0")]
    ZeroHeralding,

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by user input (presets, config files, overrides,
    /// invalid parameter values) as opposed to failures while running.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::MemoryMismatch { .. }
                | Error::UnknownPreset(_)
                | Error::Config(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
