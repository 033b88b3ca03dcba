use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter or argument fell outside the domain where the quantity is defined.
    #[error("{name} = {value} is outside the valid domain: {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("arguments out of order: {0}")]
    ArgumentOrder(String),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    /// Cholesky factorization failed even after the maximum diagonal jitter.
    #[error("covariance matrix of size {size} is not numerically positive definite (jitter up to {max_jitter:e})")]
    NumericalConditioning { size: usize, max_jitter: f64 },

    #[error("quadrature failed to converge: estimate {estimate:e}, error {error:e}, {evaluations} evaluations")]
    Quadrature {
        estimate: f64,
        error: f64,
        evaluations: usize,
    },

    #[error("power-law fit undefined: {0}")]
    Fit(String),
}

pub(crate) fn check_domain(
    ok: bool,
    name: &'static str,
    value: f64,
    expected: &'static str,
) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            expected,
        })
    }
}
