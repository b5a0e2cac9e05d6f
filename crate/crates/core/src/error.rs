use thiserror::Error;

/// Errors produced anywhere in the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("representation mismatch: expected {expected} field, got {found}")]
    RepresentationMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("derivative order {order} exceeds the supported maximum {max}")]
    DerivativeOrder { order: u32, max: u32 },

    #[error("alpha = {0} lies outside the open interval (0, 1/8)")]
    InvalidAlpha(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("radial integral diverges: exponent {exponent} >= 3")]
    NonIntegrable { exponent: f64 },

    #[error("time {t} is not before the horizon {horizon}")]
    PastHorizon { t: f64, horizon: f64 },

    #[error("time step {dt} exceeds the allowed step {limit}")]
    TimeStep { dt: f64, limit: f64 },

    #[error("numerical blow-up at step {step} (t = {t}): {what} is not finite")]
    NumericalBlowup { step: u64, t: f64, what: String },

    #[error("invalid ledger: {0}")]
    InvalidLedger(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
