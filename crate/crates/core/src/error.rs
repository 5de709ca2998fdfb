use core::fmt;

use crate::C64;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates an operation's precondition.
    InvalidParameter(&'static str),
    /// The Laurent data does not describe a conformal exterior map.
    InvalidMap(&'static str),
    /// `|w| < 1` passed to a map that is only defined on `|w| ≥ 1`.
    OutsideDomain { w: C64 },
    /// A point inside `K` was given where the exterior was required.
    InsidePoint { z: C64 },
    /// Newton inversion of `φ` did not converge.
    NonConvergence { z: C64, last: C64, iterations: usize },
    /// Doubling the quadrature nodes changed the result by more than the
    /// tolerance.
    QuadratureNonConvergence { coarse: C64, fine: C64, nodes: usize },
    /// A Cholesky pivot was not positive.
    NotPositiveDefinite { index: usize, pivot: f64 },
    /// The weight exponent is too small for the requested degree.
    DegreeTooLarge { degree: usize, s: f64 },
    /// The requested error-model cell is not covered by the theory.
    NotCovered(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::InvalidMap(msg) => write!(f, "invalid exterior map: {msg}"),
            Error::OutsideDomain { w } => {
                write!(f, "|w| = {} is below 1, outside the map's domain", w.norm())
            }
            Error::InsidePoint { z } => write!(f, "point {z} lies inside K"),
            Error::NonConvergence { z, last, iterations } => write!(
                f,
                "inverting the exterior map at {z} did not converge after {iterations} iterations (last iterate {last})"
            ),
            Error::QuadratureNonConvergence { coarse, fine, nodes } => write!(
                f,
                "quadrature did not stabilise at {nodes} nodes: estimates {coarse} and {fine}"
            ),
            Error::NotPositiveDefinite { index, pivot } => {
                write!(f, "Gram matrix not positive definite: pivot {index} is {pivot:e}")
            }
            Error::DegreeTooLarge { degree, s } => {
                write!(f, "degree {degree} requires s ≥ {}, got s = {s}", degree + 2)
            }
            Error::NotCovered(msg) => write!(f, "not covered: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

impl Error {
    /// True for failures of an iterative or quadrature procedure, as opposed
    /// to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::QuadratureNonConvergence { .. }
                | Error::NotPositiveDefinite { .. }
        )
    }
}
