//! Error types shared across the pricing engine.

use thiserror::Error;

/// Errors produced by the pricing engine.
///
/// `Domain` covers invalid inputs (bad parameters, out-of-range arguments,
/// mismatched grids). `Resource` covers configured limits being exceeded
/// (register too large for the state-vector memory cap, enumeration cap).
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
