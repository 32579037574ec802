//! Pointwise evaluation.
//!
//! All symbolic work is exact; floating point enters only at the last step.
//! For each decay rate the polynomial part is summed in rational arithmetic
//! (coefficients of 100-term series span hundreds of orders of magnitude, and
//! the cancellation must happen before any rounding), converted to `f64`
//! once, and multiplied by a floating `exp(-lambda u)`.

use num_traits::Zero;

use super::term::DistFactor;
use super::{AlgebraError, Expr};
use crate::rational::{pow_u32, to_f64, Rational};

/// An expression prepared for repeated evaluation at fixed `t` (and `r`):
/// per decay rate, dense coefficients of the remaining polynomial in `u`.
///
/// The step convention is `theta(r - u) = 1` for `u <= r`, matching the way
/// the closed-form solutions are written.
pub struct Evaluator {
    /// smooth terms: (rate, u-coefficients, active for u > r too)
    groups: Vec<RateGroup>,
    dirac_value: f64,
    radius: Option<Rational>,
}

struct RateGroup {
    rate: Rational,
    /// coefficients of u^0, u^1, ... from plain terms
    plain: Vec<Rational>,
    /// coefficients from theta terms, only active for u <= r
    theta: Vec<Rational>,
}

fn accumulate(coeffs: &mut Vec<Rational>, pow: u32, value: Rational) {
    let pow = pow as usize;
    if coeffs.len() <= pow {
        coeffs.resize(pow + 1, Rational::zero());
    }
    coeffs[pow] += value;
}

fn horner(coeffs: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

impl Evaluator {
    pub(crate) fn prepare(
        expr: &Expr,
        t: &Rational,
        r: Option<&Rational>,
    ) -> Result<Evaluator, AlgebraError> {
        if expr.references_radius() && r.is_none() {
            return Err(AlgebraError::MissingRadius);
        }
        let mut groups: Vec<RateGroup> = Vec::new();
        let mut dirac = Rational::zero();
        let mut dirac_float = 0.0;
        for term in expr.terms() {
            let mut value = &term.coeff * pow_u32(t, term.t_pow);
            if term.r_pow > 0 {
                value *= pow_u32(r.expect("checked above"), term.r_pow);
            }
            match term.dist {
                DistFactor::DiracAtR => {
                    if term.exp_rate.is_zero() {
                        dirac += value;
                    } else {
                        // decay factor evaluated at the Dirac support u = r
                        let arg = &term.exp_rate * r.expect("checked above");
                        dirac_float += to_f64(&value) * (-to_f64(&arg)).exp();
                    }
                }
                DistFactor::One | DistFactor::ThetaBelowR => {
                    let group = match groups.iter_mut().find(|g| g.rate == term.exp_rate) {
                        Some(g) => g,
                        None => {
                            groups.push(RateGroup {
                                rate: term.exp_rate.clone(),
                                plain: Vec::new(),
                                theta: Vec::new(),
                            });
                            groups.last_mut().expect("just pushed")
                        }
                    };
                    let coeffs = if term.dist == DistFactor::One {
                        &mut group.plain
                    } else {
                        &mut group.theta
                    };
                    accumulate(coeffs, term.u_pow, value);
                }
            }
        }
        Ok(Evaluator {
            groups,
            dirac_value: to_f64(&dirac) + dirac_float,
            radius: r.cloned(),
        })
    }

    /// Smooth value at `u` and the (u-independent) Dirac coefficient.
    pub fn eval(&self, u: &Rational) -> (f64, f64) {
        let in_support = match &self.radius {
            Some(r) => u <= r,
            None => false,
        };
        let mut smooth = 0.0;
        for group in &self.groups {
            let mut poly = horner(&group.plain, u);
            if in_support && !group.theta.is_empty() {
                poly += horner(&group.theta, u);
            }
            if poly.is_zero() {
                continue;
            }
            let decay = if group.rate.is_zero() {
                1.0
            } else {
                (-to_f64(&(&group.rate * u))).exp()
            };
            smooth += to_f64(&poly) * decay;
        }
        (smooth, self.dirac_value)
    }

    pub fn dirac_coefficient(&self) -> f64 {
        self.dirac_value
    }
}

impl Expr {
    /// Prepares the expression for repeated evaluation at fixed `t` / `r`.
    pub fn evaluator(
        &self,
        t: &Rational,
        r: Option<&Rational>,
    ) -> Result<Evaluator, AlgebraError> {
        Evaluator::prepare(self, t, r)
    }

    /// Single-point evaluation; returns `(smooth_value, dirac_coefficient)`.
    pub fn evaluate(
        &self,
        t: &Rational,
        u: &Rational,
        r: Option<&Rational>,
    ) -> Result<(f64, f64), AlgebraError> {
        Ok(self.evaluator(t, r)?.eval(u))
    }
}
