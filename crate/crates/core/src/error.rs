use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },
    #[error("exact integer overflow in {0}")]
    Overflow(&'static str),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("series does not converge: {0}")]
    NonConvergent(String),
    #[error("quadrature tolerance {tolerance:e} not met (achieved {achieved:e})")]
    Quadrature { tolerance: f64, achieved: f64 },
    #[error("missing residue of the Dedekind zeta function for {0}")]
    MissingResidue(String),
    #[error("contract violated: {0}")]
    Contract(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument { name, reason: reason.into() }
    }

    /// True for failures of a numerical contract (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Overflow(_)
                | Error::NonConvergent(_)
                | Error::Quadrature { .. }
                | Error::Contract(_)
                | Error::InsufficientData(_)
        )
    }
}
