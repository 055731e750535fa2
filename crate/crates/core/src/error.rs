use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Invalid or inconsistent configuration; the string names the field.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{method} needs at least {minimum} observations to fit, got {got}")]
    SeriesTooShort {
        method: &'static str,
        minimum: usize,
        got: usize,
    },

    /// An operation was invoked out of order, e.g. forecasting before fitting.
    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// A cold-start observation that is non-finite or non-positive.
    #[error("rejected measurement: {0}")]
    Measurement(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn protocol(msg: impl Into<String>) -> Self {
        Error::Protocol(msg.into())
    }
}
