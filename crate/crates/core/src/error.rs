use thiserror::Error;

use crate::field::Repr;

#[derive(Debug, Error)]
pub enum Error {
    #[error("field is in {found:?} representation, expected {expected:?}")]
    WrongRepr { expected: Repr, found: Repr },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("symbol returned non-finite value {value} at xi = ({kx}, {ky})")]
    NonFiniteSymbol { kx: f64, ky: f64, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("blow-up at t = {t}: max|u| = {max_abs}")]
    BlowUp { t: f64, max_abs: f64 },

    #[error("unknown {kind} `{name}`; valid: {valid}")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        valid: String,
    },

    #[error("sample rejected: {0}")]
    SampleRejected(String),

    #[error("regularity s = {s} is at or below the threshold: {constraint}")]
    BelowThreshold { s: f64, constraint: String },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("checkpoint format: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
