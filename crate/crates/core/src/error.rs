use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Input outside the domain of an operation (bad spec, out-of-range cube dimension, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// A size or enumeration limit would be exceeded.
    #[error("resource error: {0}")]
    Resource(String),
    /// A circuit or gate table could not be assembled consistently.
    #[error("construction error: {0}")]
    Construction(String),
    /// Malformed textual input; `pos` is the byte offset of the offending character.
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
