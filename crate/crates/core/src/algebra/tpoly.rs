//! Polynomials in `t` and `r` with rational coefficients: the value class of
//! moments of in-scope expressions.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::AlgebraError;
use crate::rational::{pow_u32, Rational};

/// A polynomial `sum coeff * t^a * r^c`, canonical (no zero coefficients).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TPoly {
    coeffs: BTreeMap<(u32, u32), Rational>,
}

impl TPoly {
    pub fn zero() -> Self {
        TPoly::default()
    }

    pub fn constant(value: Rational) -> Self {
        let mut p = TPoly::zero();
        p.add_coeff(0, 0, value);
        p
    }

    pub fn from_coeffs(coeffs: impl IntoIterator<Item = ((u32, u32), Rational)>) -> Self {
        let mut p = TPoly::zero();
        for ((t_pow, r_pow), c) in coeffs {
            p.add_coeff(t_pow, r_pow, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Adds `value * t^t_pow * r^r_pow`, dropping the entry if it cancels.
    pub fn add_coeff(&mut self, t_pow: u32, r_pow: u32, value: Rational) {
        if value.is_zero() {
            return;
        }
        let entry = self.coeffs.entry((t_pow, r_pow)).or_insert_with(Rational::zero);
        *entry += value;
        if entry.is_zero() {
            self.coeffs.remove(&(t_pow, r_pow));
        }
    }

    pub fn add(&self, other: &TPoly) -> TPoly {
        let mut out = self.clone();
        for (&(a, c), v) in &other.coeffs {
            out.add_coeff(a, c, v.clone());
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> TPoly {
        if s.is_zero() {
            return TPoly::zero();
        }
        TPoly {
            coeffs: self.coeffs.iter().map(|(&k, v)| (k, v * s)).collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(u32, u32), &Rational)> {
        self.coeffs.iter()
    }

    /// Whether any monomial carries a positive `r` power.
    pub fn references_radius(&self) -> bool {
        self.coeffs.keys().any(|&(_, r_pow)| r_pow > 0)
    }

    /// Exact evaluation at rational `t` (and `r`, when referenced).
    pub fn eval(&self, t: &Rational, r: Option<&Rational>) -> Result<Rational, AlgebraError> {
        if self.references_radius() && r.is_none() {
            return Err(AlgebraError::MissingRadius);
        }
        let mut acc = Rational::zero();
        for (&(t_pow, r_pow), coeff) in &self.coeffs {
            let mut v = coeff * pow_u32(t, t_pow);
            if r_pow > 0 {
                v *= pow_u32(r.expect("checked above"), r_pow);
            }
            acc += v;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    #[test]
    fn cancellation_keeps_it_canonical() {
        let mut p = TPoly::zero();
        p.add_coeff(1, 0, rat_int(3));
        p.add_coeff(1, 0, rat_int(-3));
        assert!(p.is_zero());
        assert_eq!(p, TPoly::zero());
    }

    #[test]
    fn eval_needs_radius_only_when_referenced() {
        let p = TPoly::from_coeffs([((1, 0), rat_int(2)), ((0, 2), rat(1, 2))]);
        assert_eq!(p.eval(&rat_int(3), None), Err(AlgebraError::MissingRadius));
        let v = p.eval(&rat_int(3), Some(&rat_int(2))).unwrap();
        assert_eq!(v, rat_int(8)); // 2*3 + (1/2)*4

        let q = TPoly::constant(rat(5, 7));
        assert_eq!(q.eval(&rat_int(9), None).unwrap(), rat(5, 7));
    }
}
