use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("operation `{op}` does not support {kind} series")]
    UnsupportedKind { op: &'static str, kind: &'static str },
    #[error("singular input: {0}")]
    Singular(String),
    #[error("composition domain violated: sup |inner| = {sup} on the sample circle")]
    Domain { sup: f64 },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },
    #[error("solver breakdown: {0}")]
    Breakdown(String),
    #[error("extension invalid: sup |mu| = {sup} >= 1")]
    ExtensionInvalid { sup: f64 },
    #[error("cap degenerate: |eps| = {0} >= 1")]
    CapDegenerate(f64),
    #[error("degeneration: {0}")]
    Degeneration(String),
    #[error("chart incompatible: {0}")]
    ChartIncompatible(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("ill-conditioned: {0}")]
    Conditioning(String),
}

pub type Result<T> = std::result::Result<T, Error>;
