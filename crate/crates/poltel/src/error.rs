use thiserror::Error;

/// Errors produced by model construction, metric evaluation, and optimization.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("closed-form argument outside its real domain: {0}")]
    OutOfDomain(String),

    #[error("achieved signal gain {gain} deviates from unity by more than {tol}")]
    GainNotUnity { gain: f64, tol: f64 },

    #[error("no classical signal on quadrature {0}; transfer coefficient undefined")]
    ZeroSignal(String),

    #[error("direct detection requires a bright carrier (|alpha| >= {min}), got {carrier}")]
    DimCarrier { carrier: f64, min: f64 },

    #[error("optimization failed: {0}")]
    Optimization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }
}
