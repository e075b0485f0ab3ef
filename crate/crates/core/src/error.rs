use thiserror::Error;

/// Errors raised by the statistics, estimators, resampler and simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CojumpError {
    /// A ratio statistic or standardizer has a vanishing denominator.
    #[error("denominator vanishes: {0}")]
    DenominatorZero(&'static str),

    #[error("insufficient data: need at least {needed} increments, have {have}")]
    InsufficientData { needed: usize, have: usize },

    #[error("index {index} outside the admissible window range [{lo}, {hi}]")]
    IndexOutOfWindow { index: usize, lo: usize, hi: usize },

    #[error("{n_draws} draws cannot resolve level {level}: need n_draws * level >= 1")]
    InsufficientDraws { n_draws: usize, level: f64 },

    #[error("truncated cutoff requested without a power guard (alpha', varpi')")]
    MissingPowerGuard,

    #[error("degenerate scenario: {0}")]
    DegenerateConfig(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, CojumpError>;
