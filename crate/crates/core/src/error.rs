use std::fmt;

/// Errors produced by model construction, simulation, sampling and fitting.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A vector or matrix had the wrong shape for the operation.
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    Dimension {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    /// A scalar argument was outside its admissible range.
    #[error("invalid argument {name}: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    /// A simulated state or intermediate quantity stopped being finite.
    #[error("non-finite value in {context} (path {path}, step {step}, component {component})")]
    NonFinite {
        context: &'static str,
        component: usize,
        step: usize,
        path: usize,
    },

    /// A matrix that must be positive definite was not.
    #[error("matrix not positive definite in {context}")]
    NotPositiveDefinite { context: &'static str },

    /// Structured text or CSV input could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// An optimizer exhausted its iteration budget without meeting its
    /// convergence tolerance.
    #[error("did not converge after {iterations} iterations (gradient norm {gradient_norm:.3e})")]
    NoConvergence {
        iterations: usize,
        gradient_norm: f64,
    },

    /// A child-process response evaluator failed.
    #[error("external simulator failed: {0}")]
    Simulator(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(name: &'static str, reason: impl fmt::Display) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.to_string(),
        }
    }

    pub fn parse(line: usize, message: impl fmt::Display) -> Self {
        Error::Parse {
            line,
            message: message.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
