use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported dimension {got} (expected {expected})")]
    UnsupportedDimension { expected: usize, got: usize },

    #[error("channel {channel} ({name}) rate is {value} at state {state:?}")]
    Rate {
        channel: usize,
        name: String,
        value: f64,
        state: Vec<f64>,
    },

    #[error("dominating bound {bound} of channel {channel} ({name}) exceeded by rate {value} at state {state:?}")]
    BoundExceeded {
        channel: usize,
        name: String,
        bound: f64,
        value: f64,
        state: Vec<f64>,
    },

    #[error("fluid solution left the model domain at t = {t}: {state:?}")]
    DomainEscape { t: f64, state: Vec<f64> },

    #[error("unstable kernel: branching ratio {0} >= 1")]
    Stability(f64),

    #[error("statistics error: {0}")]
    Statistics(String),

    #[error("log-domain error: {0}")]
    LogDomain(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn check_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}
