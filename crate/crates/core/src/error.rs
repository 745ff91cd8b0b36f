use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("points {first} and {second} coincide")]
    DuplicatePoint { first: usize, second: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("singular system: pivot magnitude {pivot:e}")]
    SingularSystem { pivot: f64 },

    #[error("kernel block B is singular or not positive definite: pivot {pivot:e}")]
    SingularKernelBlock { pivot: f64 },

    #[error("polynomial block is rank deficient on these sites: Schur pivot {pivot:e}")]
    RankDeficientPolynomial { pivot: f64 },

    #[error("conjugate gradients did not converge after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
}

impl Error {
    /// True for failures of the numerical linear algebra, as opposed to bad
    /// input data or configuration.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularSystem { .. }
                | Error::SingularKernelBlock { .. }
                | Error::RankDeficientPolynomial { .. }
                | Error::NoConvergence { .. }
        )
    }

    pub(crate) fn invalid_input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn invalid_config(msg: impl Into<String>) -> Self {
        Error::InvalidConfiguration(msg.into())
    }
}
