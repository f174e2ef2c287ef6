//! Exact computation of degenerate Bernoulli numbers of the second kind and
//! mechanical verification of the identities that connect them to degenerate
//! Stirling numbers, partial Bell polynomials, and a family of nonlinear
//! differential equations.

pub mod arith;
pub mod bernoulli;
pub mod cli;
pub mod coeff_a;
pub mod combinatorics;
pub mod error;
pub mod series;
pub mod verify;

pub use arith::{Coeff, Lambda, LambdaPoly, LambdaSpec, Rational, Scalar};
pub use error::{Error, Result};
