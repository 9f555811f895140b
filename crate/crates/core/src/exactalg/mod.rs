//! Exact arithmetic: rationals, prime fields, sparse multivariate polynomials and
//! the small dense linear algebra used by every other module.

pub mod fp;
pub mod matrix;
pub mod poly;
pub mod resultant;
pub mod scalar;

pub use fp::Fp;
pub use matrix::{adj3, det3, det_bareiss, Echelon, Matrix, SymMatrix};
pub use poly::{Monomial, MultiPoly, QPoly};
pub use resultant::{dehomogenize_binary, resultant_elim, squarefree_univariate, UniPoly};
pub use scalar::{rat, ratio, Rational, Ring, Scalar};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AlgError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("arity mismatch: expected {expected} variables, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("zero polynomial passed to {0}")]
    ZeroInput(&'static str),
}
