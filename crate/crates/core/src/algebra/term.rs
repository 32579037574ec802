//! A single monomial of the term class.

use crate::rational::Rational;
use num_traits::Signed;

/// Distributional factor attached to a term.
///
/// `DiracAtR` and `ThetaBelowR` reference the single global radius parameter
/// `r` of a monodisperse initial condition; they only appear in problems that
/// declare it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DistFactor {
    /// No distributional factor.
    One,
    /// `delta(u - r)`.
    DiracAtR,
    /// `theta(r - u)`, the unit step supported on `u <= r`.
    ThetaBelowR,
}

/// One monomial `coeff * t^t_pow * u^u_pow * r^r_pow * exp(-exp_rate * u) * dist`.
///
/// Dirac terms are kept in sifted form: `u^b * delta(u-r) = r^b * delta(u-r)`,
/// so `u_pow` is always zero on them (normalization enforces this). The decay
/// rate is retained on Dirac terms as written; it contributes
/// `exp(-exp_rate * r)` on evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: Rational,
    pub t_pow: u32,
    pub u_pow: u32,
    pub r_pow: u32,
    pub exp_rate: Rational,
    pub dist: DistFactor,
}

impl Term {
    pub fn new(
        coeff: Rational,
        t_pow: u32,
        u_pow: u32,
        r_pow: u32,
        exp_rate: Rational,
        dist: DistFactor,
    ) -> Self {
        assert!(!exp_rate.is_negative(), "decay rate must be nonnegative");
        Term { coeff, t_pow, u_pow, r_pow, exp_rate, dist }
    }

    /// Smooth term `coeff * t^t_pow * u^u_pow * exp(-rate * u)`.
    pub fn smooth(coeff: Rational, t_pow: u32, u_pow: u32, exp_rate: Rational) -> Self {
        Term::new(coeff, t_pow, u_pow, 0, exp_rate, DistFactor::One)
    }

    /// Dirac term `coeff * t^t_pow * r^r_pow * delta(u - r)`.
    pub fn dirac(coeff: Rational, t_pow: u32, r_pow: u32) -> Self {
        Term::new(coeff, t_pow, 0, r_pow, Rational::default(), DistFactor::DiracAtR)
    }

    /// Step term `coeff * t^t_pow * u^u_pow * r^r_pow * theta(r - u)`.
    pub fn theta(coeff: Rational, t_pow: u32, u_pow: u32, r_pow: u32) -> Self {
        Term::new(coeff, t_pow, u_pow, r_pow, Rational::default(), DistFactor::ThetaBelowR)
    }

    /// Applies the sifting identity `u * delta(u-r) = r * delta(u-r)`,
    /// folding any `u` powers on a Dirac term into `r` powers.
    pub(crate) fn sifted(mut self) -> Self {
        if self.dist == DistFactor::DiracAtR && self.u_pow > 0 {
            self.r_pow += self.u_pow;
            self.u_pow = 0;
        }
        self
    }

    /// Whether the term references the radius parameter.
    pub fn references_radius(&self) -> bool {
        self.r_pow > 0 || self.dist != DistFactor::One
    }
}
