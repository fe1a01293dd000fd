use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure stopped before reaching its tolerance.
    #[error("accuracy error: {context} (last estimate {estimate:e}, error estimate {error:e})")]
    Accuracy {
        context: String,
        estimate: f64,
        error: f64,
    },

    /// A caller-supplied object violated its documented contract.
    #[error("contract error: {0}")]
    Contract(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn is_accuracy(&self) -> bool {
        matches!(self, Error::Accuracy { .. })
    }
}
