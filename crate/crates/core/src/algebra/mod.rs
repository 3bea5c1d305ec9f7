//! Exact sparse polynomial and truncated power-series arithmetic.

mod gaussian;
mod homo;
pub mod literal;
mod monomial;
mod param;
mod scalar;
mod series;

pub use gaussian::GaussianRational;
pub use homo::HomoPoly;
pub use literal::{parse_polynomial, parse_scalar, LiteralError};
pub use monomial::MultiIndex;
pub use param::{param_constant_term, param_degree, ParamMonomial, ParamScalar};
pub use scalar::{rational, rational_to_f64, Rational, Ring, Scalar};
pub use series::GradedSeries;
