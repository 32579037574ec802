//! Exact arithmetic and integral transforms on the closed term class
//! `coeff * t^a * u^b * r^c * exp(-lambda u) * D` with
//! `D in {1, delta(u-r), theta(r-u)}`.
//!
//! Every operation except the final step of pointwise evaluation is carried
//! out in arbitrary-precision rational arithmetic; semantically equal
//! expressions normalize to identical values, so tests can compare
//! symbolically with `==`.

mod eval;
mod expr;
mod term;
mod tpoly;

pub use eval::Evaluator;
pub use expr::Expr;
pub use term::{DistFactor, Term};
pub use tpoly::TPoly;

use thiserror::Error;

/// Typed failures of the term algebra.
///
/// The supported class is deliberately tight: anything that would leave it
/// (a divergent tail, a mixed-rate convolution, a distributional factor
/// combined with a decay rate inside an integral transform) is rejected
/// instead of being approximated.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    /// A polynomial term with zero decay rate has no finite tail integral.
    #[error("divergent tail integral: polynomial term with zero decay rate")]
    DivergentTail,
    /// A polynomial term with zero decay rate has no finite moment.
    #[error("divergent moment: polynomial term with zero decay rate")]
    DivergentMoment,
    /// Convolution requires one common decay rate on both operands.
    #[error("mixed decay rates in convolution")]
    MixedRates,
    /// The operand contains terms the requested transform cannot represent
    /// inside the class.
    #[error("unsupported term class: {0}")]
    UnsupportedClass(&'static str),
    /// The expression references the radius parameter `r` but no radius was
    /// supplied.
    #[error("missing radius: expression references r but none was supplied")]
    MissingRadius,
}
