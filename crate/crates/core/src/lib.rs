//! Curvature laboratory for Randers metrics `F = α + β`.
//!
//! The crate computes Ricci curvature, the Akbar-Zadeh scalar curvature,
//! S-curvature, distortion and mean Cartan torsion of a Randers metric twice:
//! once from closed-form expressions in the covariant derivatives of `β`
//! ([`randers`]), and once straight from `F` by higher-order forward
//! differentiation ([`oracle`]). On top of that it offers homogeneous
//! polynomial extraction and divisibility tests ([`polyalg`]) and pointwise
//! classification of metric classes ([`classify`]).
//!
//! Everything here is `no_std` + `alloc`; file formats, reports and the
//! command line live in the companion `randers-lab` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod classify;
pub mod exprlang;
pub mod jets;
pub mod linalg;
pub mod metric;
pub mod oracle;
pub mod polyalg;
pub mod randers;
pub mod riemann;
pub mod sampling;
pub mod terms;

#[cfg(test)]
pub(crate) mod testutil;

use alloc::string::String;

pub use exprlang::{Expr, ParseError};
pub use jets::{Jet, JetTable, Scalar};
pub use metric::{builtin_metric, BuiltinParams, MetricDefinition};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{func} is undefined at {value}")]
    Domain { func: &'static str, value: f64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),
    #[error("jet order {0} exceeds the supported maximum of 6")]
    JetOrder(u8),
    #[error("invalid parameters: {0}")]
    InvalidParams(&'static str),
    #[error("unknown builtin metric `{0}`")]
    UnknownBuiltin(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("a(x) is not positive definite (eigenvalue {eigenvalue:e})")]
    NotPositiveDefinite { eigenvalue: f64 },
    #[error("Randers condition violated: ||beta||^2 = {b2} (need < 1 - 1e-10)")]
    RandersViolation { b2: f64 },
    #[error("direction vector is zero or degenerate")]
    DegenerateDirection,
    #[error("singular matrix")]
    Singular,
    #[error("{0} is not homogeneous of the requested degree")]
    NotHomogeneous(&'static str),
    #[error("ill-conditioned monomial system (condition estimate {0:e})")]
    IllConditioned(f64),
    #[error("rank-deficient least-squares system (rank {rank} of {cols})")]
    RankDeficient { rank: usize, cols: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
