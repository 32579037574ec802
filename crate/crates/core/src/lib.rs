//! Series solutions of the pure breakage equation and the coupled
//! aggregation-breakage equation by the Daftardar-Jafari iterative method.
//!
//! The number density `c(t, u)` of particles of volume `u` at time `t` evolves
//! under binary uniform breakage (`B(u, v) = 2/v`, selection `S(v) = v^k`) and
//! optionally constant-kernel aggregation (`K = 1`). Every iterate of the
//! method stays inside a closed class of exponential-polynomial terms
//! `coeff * t^a * u^b * r^c * exp(-lambda u) * {1, delta(u-r), theta(r-u)}`,
//! so the series components can be carried exactly in rational arithmetic.
//!
//! Crate layout:
//!
//! - [`algebra`] — the exact term algebra: canonical expressions, integral
//!   transforms (tail integral, convolution, moments), and pointwise
//!   evaluation.
//! - [`djm`] — the iterative recursion producing [`djm::SeriesSolution`]s,
//!   plus the closed-form general terms used as verification oracles.
//! - [`exact`] — closed-form reference solutions and their moments.
//! - [`oracle`] — a direct midpoint-quadrature / RK4 grid solver used as an
//!   independent ground truth where no closed form exists.
//! - [`report`] — case configuration files and the CSV artifacts behind the
//!   density/error/moment tables.
//! - [`quad`] — adaptive Gauss-Legendre quadrature used by [`exact`].

pub mod algebra;
pub mod djm;
pub mod exact;
pub mod oracle;
pub mod quad;
pub mod rational;
pub mod report;

pub use algebra::{AlgebraError, DistFactor, Expr, TPoly, Term};
pub use djm::{
    closed_form_term, compute_series, Aggregation, EngineError, ProblemSpec, SeriesSolution,
};
pub use exact::{ExactCase, ExactError};
pub use oracle::{GridState, OracleError};
pub use rational::Rational;
