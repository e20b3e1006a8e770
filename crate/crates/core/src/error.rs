use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the region where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical routine stopped at its budget without reaching the
    /// requested tolerance. The best estimate is still reported.
    #[error("no convergence: estimate {estimate} with error {error:.3e} exceeds tolerance {tol:.3e}")]
    Convergence { estimate: f64, error: f64, tol: f64 },

    /// Cholesky factorization broke down.
    #[error("matrix is not positive definite (pivot {pivot} = {value:.3e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
