use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A numeric argument lies outside the set where the operation is defined.
    #[error("{what} = {value} is outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    /// Two arms that must share an exponential family do not.
    #[error("arms follow different families ({0} vs {1})")]
    FamilyMismatch(String, String),

    /// An arm has no observations where at least one is required.
    #[error("arm {arm} has no observations")]
    EmptyArm { arm: usize },

    /// The answer (best arm, best pair) is not unique.
    #[error("the answer is not unique for the given means")]
    TiedAnswer,

    /// An iterative solver hit its iteration cap.
    #[error("solver did not converge: {0}")]
    NoConvergence(String),

    /// The requested combination is not implemented.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Structurally invalid input (length mismatch, empty model, ...).
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(what: &'static str, value: f64, domain: &'static str) -> Error {
    Error::Domain {
        what,
        value,
        domain,
    }
}
