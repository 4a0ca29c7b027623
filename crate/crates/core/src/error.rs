use core::fmt;

use alloc::string::String;

use crate::expr::EvalError;
use crate::quad::{QuadError, QuadResult};

/// Failures of the space, decomposition and weak-derivative operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    Quad(QuadError),
    Eval(EvalError),
    /// The integral of the order-`order` term did not converge.
    Integral { order: u32, result: QuadResult },
    /// An integral against a named test function did not converge.
    TestIntegral { test_function: String, result: QuadResult },
    ZeroNorm,
    EmptyBasis,
    IllConditioned { det_scale: f64 },
    /// A function required to vanish on the boundary does not.
    NotInW0 { x: f64, value: f64 },
    RegularityTooHigh(u32),
    InvalidArgument(&'static str),
}

impl Error {
    /// True for failures caused by a non-convergent integral.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Integral { .. } | Error::TestIntegral { .. } | Error::Quad(QuadError::Eval(_)) | Error::Eval(_))
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = |r: &QuadResult| if r.diverged { "diverges" } else { "did not converge" };
        match self {
            Error::Quad(e) => write!(f, "{e}"),
            Error::Eval(e) => write!(f, "evaluation failed: {e}"),
            Error::Integral { order, result } => write!(
                f,
                "integral of the order-{order} derivative term {} (estimate {}, error {})",
                verdict(result),
                result.value,
                result.error_estimate
            ),
            Error::TestIntegral { test_function, result } => write!(
                f,
                "integral against test function {test_function} {} (estimate {})",
                verdict(result),
                result.value
            ),
            Error::ZeroNorm => write!(f, "argument has zero norm"),
            Error::EmptyBasis => write!(f, "basis is empty"),
            Error::IllConditioned { det_scale } => {
                write!(f, "Gram matrix is numerically singular (scaled determinant {det_scale:e})")
            }
            Error::NotInW0 { x, value } => {
                write!(f, "function must vanish on the boundary but equals {value} at x = {x}")
            }
            Error::RegularityTooHigh(k) => write!(f, "regularity {k} exceeds the supported maximum of 6"),
            Error::InvalidArgument(msg) => f.write_str(msg),
        }
    }
}

impl From<QuadError> for Error {
    fn from(e: QuadError) -> Self {
        Error::Quad(e)
    }
}

impl From<EvalError> for Error {
    fn from(e: EvalError) -> Self {
        Error::Eval(e)
    }
}
