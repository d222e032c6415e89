use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    Domain(String),
    /// The requested moment order is not below the tail index.
    MomentDiverges { order: usize, index: f64 },
    /// More cumulants were needed than the density has.
    InsufficientCumulants { needed: usize, available: usize },
    /// Adaptive quadrature ran out of panels before meeting its tolerance.
    QuadratureNonConvergence { panels: usize, error_estimate: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::MomentDiverges { order, index } => {
                write!(f, "moment of order {order} diverges for tail index {index}")
            }
            Error::InsufficientCumulants { needed, available } => write!(
                f,
                "need cumulants up to order {needed}, only {available} are finite"
            ),
            Error::QuadratureNonConvergence {
                panels,
                error_estimate,
            } => write!(
                f,
                "quadrature did not converge after {panels} panels (error estimate {error_estimate:e})"
            ),
        }
    }
}

impl core::error::Error for Error {}
