use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of the operation (negative `s`, scv out of range, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The queueing model itself is degenerate, e.g. a queue whose services never complete.
    #[error("model error at queue {queue}: {reason}")]
    Model { queue: usize, reason: String },

    #[error("quadrature did not converge on [{lower}, {upper}]: estimate {estimate:e}, error {error:e} after {subdivisions} subdivisions")]
    Quadrature {
        lower: f64,
        upper: f64,
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("unsupported model: {0}")]
    Unsupported(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
