use thiserror::Error;

/// Failures reported by the solvers and the CLI front end.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// No bound state exists for the requested level. `best_energy` is the
    /// lowest energy seen while searching, when one was available.
    #[error("no bound state: {reason}")]
    NoBoundState {
        reason: String,
        best_energy: Option<f64>,
    },

    /// A bracket was found but the iteration did not reach its tolerance.
    #[error("convergence failure: {0}")]
    Convergence(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn convergence(msg: impl Into<String>) -> Self {
        Error::Convergence(msg.into())
    }

    /// True for failures of a numerical procedure (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoBoundState { .. } | Error::Convergence(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
