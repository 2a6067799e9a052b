use thiserror::Error;

/// Everything that can go wrong inside the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("quadrature did not converge: estimate {estimate:e} with error bound {error:e}")]
    Convergence { estimate: f64, error: f64 },

    #[error("divergent integral: singularity exponent {exponent} times p = {p} reaches dimension {dim}")]
    Divergent { exponent: f64, p: f64, dim: u32 },

    #[error("unsupported dimension {0} for the hyperbolic closed form (odd m >= 3 only)")]
    UnsupportedDimension(u32),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("non-finite objective {value} at offset {offset}, radius {radius}")]
    NonFinite { value: f64, offset: f64, radius: f64 },

    #[error("tail truncation not certified: remainder estimate {remainder:e}")]
    Truncation { remainder: f64 },

    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain(msg()))
    }
}
