use num_complex::Complex64;
use thiserror::Error;

/// Broad failure class, used to map errors onto process exit codes and
/// C status values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// The caller handed us something malformed (wrong shapes, bad flags).
    Input,
    /// The input is well formed but outside the mathematical domain.
    Domain,
    /// An iteration failed to converge or lost too much accuracy.
    Numeric,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("modulus {k} is outside D_k (need |k| <= 1, Re k > 0, k != 1)")]
    ModulusOutOfDomain { k: Complex64 },

    #[error("argument {u} lies within {distance:e} of a pole of sn/cn/dn")]
    Pole { u: Complex64, distance: f64 },

    #[error("endpoints {i} and {j} coincide (separation {separation:e})")]
    NotDistinct { i: usize, j: usize, separation: f64 },

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("no relabeling of the endpoints gives |k^2| <= 1 with k^2 off the negative axis")]
    NotCanonicalizable,

    #[error("tuple is not certified for n = {n} (residuals {lambda_residual:e}, {lambda_prime_residual:e})")]
    NotCertified {
        n: u32,
        lambda_residual: f64,
        lambda_prime_residual: f64,
    },

    #[error("degree n = {n} outside supported range {min}..={max}")]
    UnsupportedDegree { n: u32, min: u32, max: u32 },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("not a two-arc polynomial: {odd} odd-multiplicity zeros of T^2 - 1")]
    NotTwoArc { odd: usize },

    #[error("{what} did not converge (residual {residual:e})")]
    NoConvergence { what: &'static str, residual: f64 },

    #[error("invalid input: {0}")]
    Input(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Shape(_) | Error::Input(_) => ErrorKind::Input,
            Error::NoConvergence { .. } => ErrorKind::Numeric,
            _ => ErrorKind::Domain,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
