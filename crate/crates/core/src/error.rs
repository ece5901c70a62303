use std::fmt;

use thiserror::Error;

/// Malformed expression text, with the character offset of the problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(position: usize, message: impl Into<String>) -> Self {
        Self {
            position,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at offset {}: {}",
            self.position, self.message
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("domain error at x = {x}: {reason}")]
    Domain { x: f64, reason: &'static str },

    #[error("eta table has no piece containing (v = {v}, u = {u})")]
    EtaOutsideTable { v: f64, u: f64 },

    #[error("invalid eta map: {0}")]
    InvalidEta(String),

    #[error("invalid domain [{lo}, {hi}]")]
    InvalidDomain { lo: f64, hi: f64 },

    #[error("invalid bound spec: {0}")]
    InvalidSpec(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("adaptive quadrature did not converge on [{a}, {b}] (max depth {depth})")]
    NoConvergence { a: f64, b: f64, depth: u32 },

    #[error("subinterval budget of {budget} exhausted with certificate {certificate:e} above target {target:e}")]
    BudgetExhausted {
        budget: usize,
        certificate: f64,
        target: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
