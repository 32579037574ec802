//! Canonical sums of terms and the integral transforms on them.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::term::{DistFactor, Term};
use super::{AlgebraError, TPoly};
use crate::rational::{factorial, falling_factorial, pow_u32, Rational};

/// A canonicalized finite sum of [`Term`]s: sorted by
/// `(dist, exp_rate, t_pow, u_pow, r_pow)`, like terms merged, Dirac sifting
/// applied, no zero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Expr {
    terms: Vec<Term>,
}

impl Expr {
    pub fn empty() -> Self {
        Expr::default()
    }

    /// Canonicalizes an arbitrary term list. Semantically equal inputs
    /// produce identical `Expr`s.
    ///
    /// Distinct decay rates are always few, so they are indexed up front and
    /// the merge map uses an all-integer key; comparing big rationals inside
    /// the map would dominate large merges.
    pub fn normalize(raw_terms: impl IntoIterator<Item = Term>) -> Self {
        let raw: Vec<Term> = raw_terms.into_iter().collect();
        let mut rates: Vec<Rational> = Vec::new();
        for term in &raw {
            if !rates.contains(&term.exp_rate) {
                rates.push(term.exp_rate.clone());
            }
        }
        rates.sort();
        let rate_index =
            |r: &Rational| -> u32 { rates.iter().position(|x| x == r).expect("indexed") as u32 };

        // key mirrors the canonical term order (dist, exp_rate, t, u, r)
        let mut merged: BTreeMap<(u8, u32, u32, u32, u32), Rational> = BTreeMap::new();
        for term in raw {
            let term = term.sifted();
            if term.coeff.is_zero() {
                continue;
            }
            let key = (
                term.dist as u8,
                rate_index(&term.exp_rate),
                term.t_pow,
                term.u_pow,
                term.r_pow,
            );
            let entry = merged.entry(key).or_insert_with(Rational::zero);
            *entry += term.coeff;
            if entry.is_zero() {
                merged.remove(&key);
            }
        }
        Expr {
            terms: merged
                .into_iter()
                .map(|((dist, rate_idx, t_pow, u_pow, r_pow), coeff)| Term {
                    coeff,
                    t_pow,
                    u_pow,
                    r_pow,
                    exp_rate: rates[rate_idx as usize].clone(),
                    dist: match dist {
                        0 => DistFactor::One,
                        1 => DistFactor::DiracAtR,
                        _ => DistFactor::ThetaBelowR,
                    },
                })
                .collect(),
        }
    }

    pub fn from_term(term: Term) -> Self {
        Expr::normalize([term])
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn references_radius(&self) -> bool {
        self.terms.iter().any(Term::references_radius)
    }

    pub fn has_distributional_terms(&self) -> bool {
        self.terms.iter().any(|t| t.dist != DistFactor::One)
    }

    /// Distinct decay rates appearing in the expression.
    pub fn exp_rates(&self) -> Vec<Rational> {
        let mut rates: Vec<Rational> = Vec::new();
        for t in &self.terms {
            if !rates.contains(&t.exp_rate) {
                rates.push(t.exp_rate.clone());
            }
        }
        rates
    }

    /// Exact sum.
    pub fn add(&self, other: &Expr) -> Expr {
        Expr::normalize(self.terms.iter().chain(other.terms.iter()).cloned())
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        self.add(&other.scale(&-Rational::one()))
    }

    /// Exact scalar multiple.
    pub fn scale(&self, s: &Rational) -> Expr {
        if s.is_zero() {
            return Expr::empty();
        }
        // scaling by a nonzero rational keeps keys and order intact
        Expr {
            terms: self
                .terms
                .iter()
                .map(|t| Term { coeff: &t.coeff * s, ..t.clone() })
                .collect(),
        }
    }

    /// Multiplies by a polynomial in `t` and `r`.
    pub fn mul_tpoly(&self, p: &TPoly) -> Expr {
        let mut out = Vec::new();
        for ((t_pow, r_pow), coeff) in p.iter() {
            for term in &self.terms {
                out.push(Term {
                    coeff: &term.coeff * coeff,
                    t_pow: term.t_pow + t_pow,
                    u_pow: term.u_pow,
                    r_pow: term.r_pow + r_pow,
                    exp_rate: term.exp_rate.clone(),
                    dist: term.dist,
                });
            }
        }
        Expr::normalize(out)
    }

    /// Multiplies by `u^k`. On Dirac terms the power sifts onto `r`.
    pub fn shift_u_power(&self, k: u32) -> Expr {
        Expr::normalize(self.terms.iter().map(|t| {
            let mut t = t.clone();
            match t.dist {
                DistFactor::DiracAtR => t.r_pow += k,
                _ => t.u_pow += k,
            }
            t
        }))
    }

    /// Raises every `t` power by one and divides by the new power: the
    /// antiderivative in `t` with constant fixed to zero.
    pub fn time_antiderivative(&self) -> Expr {
        Expr::normalize(self.terms.iter().map(|t| {
            let mut t = t.clone();
            t.t_pow += 1;
            t.coeff /= Rational::from_integer(t.t_pow.into());
            t
        }))
    }

    /// Tail integral `integral_u^inf v^w a(t, v) dv`, exactly.
    ///
    /// Per-term rules:
    /// - smooth, rate `lambda > 0`:
    ///   `int_u^inf v^n e^{-lambda v} dv = e^{-lambda u} sum_{j<=n} (n!/j!) u^j / lambda^{n-j+1}`;
    /// - Dirac (rate 0): `int_u^inf v^w f(v) delta(v-r) dv = r^w f(r) theta(r-u)`;
    /// - step (rate 0): `int_u^r v^n dv = (r^{n+1} - u^{n+1}) / (n+1)` on a
    ///   theta factor.
    ///
    /// A smooth polynomial term with rate 0 diverges; a Dirac or step term
    /// carrying a positive rate would leave the class (it needs an
    /// `e^{-lambda r}` factor), so both are rejected.
    pub fn tail_integral(&self, w: u32) -> Result<Expr, AlgebraError> {
        let mut out = Vec::new();
        for term in &self.terms {
            match term.dist {
                DistFactor::One => {
                    if term.exp_rate.is_zero() {
                        return Err(AlgebraError::DivergentTail);
                    }
                    let n = term.u_pow + w;
                    let lambda = &term.exp_rate;
                    for j in 0..=n {
                        let scale = Rational::from_integer(falling_factorial(n, j))
                            / pow_u32(lambda, n - j + 1);
                        out.push(Term {
                            coeff: &term.coeff * scale,
                            t_pow: term.t_pow,
                            u_pow: j,
                            r_pow: term.r_pow,
                            exp_rate: lambda.clone(),
                            dist: DistFactor::One,
                        });
                    }
                }
                DistFactor::DiracAtR => {
                    if !term.exp_rate.is_zero() {
                        return Err(AlgebraError::UnsupportedClass(
                            "tail integral of a Dirac term with positive decay rate",
                        ));
                    }
                    out.push(Term {
                        coeff: term.coeff.clone(),
                        t_pow: term.t_pow,
                        u_pow: 0,
                        r_pow: term.r_pow + w,
                        exp_rate: Rational::zero(),
                        dist: DistFactor::ThetaBelowR,
                    });
                }
                DistFactor::ThetaBelowR => {
                    if !term.exp_rate.is_zero() {
                        return Err(AlgebraError::UnsupportedClass(
                            "tail integral of a step term with positive decay rate",
                        ));
                    }
                    let n = term.u_pow + w;
                    let div = Rational::from_integer((n + 1).into());
                    out.push(Term {
                        coeff: &term.coeff / &div,
                        t_pow: term.t_pow,
                        u_pow: 0,
                        r_pow: term.r_pow + n + 1,
                        exp_rate: Rational::zero(),
                        dist: DistFactor::ThetaBelowR,
                    });
                    out.push(Term {
                        coeff: -(&term.coeff / &div),
                        t_pow: term.t_pow,
                        u_pow: n + 1,
                        r_pow: term.r_pow,
                        exp_rate: Rational::zero(),
                        dist: DistFactor::ThetaBelowR,
                    });
                }
            }
        }
        Ok(Expr::normalize(out))
    }

    /// Volume convolution `int_0^u a(t, v) b(t, u - v) dv` for smooth
    /// operands sharing one decay rate:
    /// `int_0^u v^{b1} (u-v)^{b2} dv = u^{b1+b2+1} b1! b2! / (b1+b2+1)!`.
    pub fn convolve(&self, other: &Expr) -> Result<Expr, AlgebraError> {
        if self.is_empty() || other.is_empty() {
            return Ok(Expr::empty());
        }
        for term in self.terms.iter().chain(other.terms.iter()) {
            if term.dist != DistFactor::One {
                return Err(AlgebraError::UnsupportedClass(
                    "convolution of a distributional term",
                ));
            }
        }
        let rate = &self.terms[0].exp_rate;
        if self
            .terms
            .iter()
            .chain(other.terms.iter())
            .any(|t| &t.exp_rate != rate)
        {
            return Err(AlgebraError::MixedRates);
        }
        let mut out = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                let n = a.u_pow + b.u_pow + 1;
                let beta = Rational::new(
                    factorial(a.u_pow) * factorial(b.u_pow),
                    factorial(n),
                );
                out.push(Term {
                    coeff: &a.coeff * &b.coeff * beta,
                    t_pow: a.t_pow + b.t_pow,
                    u_pow: n,
                    r_pow: a.r_pow + b.r_pow,
                    exp_rate: rate.clone(),
                    dist: DistFactor::One,
                });
            }
        }
        Ok(Expr::normalize(out))
    }

    /// Moment `mu_j = int_0^inf u^j a(t, u) du` as an exact polynomial in
    /// `t` and `r`.
    pub fn total_moment(&self, j: u32) -> Result<TPoly, AlgebraError> {
        let mut out = TPoly::zero();
        for term in &self.terms {
            match term.dist {
                DistFactor::One => {
                    if term.exp_rate.is_zero() {
                        return Err(AlgebraError::DivergentMoment);
                    }
                    let n = term.u_pow + j;
                    let value = Rational::from_integer(factorial(n))
                        / pow_u32(&term.exp_rate, n + 1);
                    out.add_coeff(term.t_pow, term.r_pow, &term.coeff * value);
                }
                DistFactor::DiracAtR => {
                    if !term.exp_rate.is_zero() {
                        return Err(AlgebraError::UnsupportedClass(
                            "moment of a Dirac term with positive decay rate",
                        ));
                    }
                    out.add_coeff(term.t_pow, term.r_pow + j, term.coeff.clone());
                }
                DistFactor::ThetaBelowR => {
                    if !term.exp_rate.is_zero() {
                        return Err(AlgebraError::UnsupportedClass(
                            "moment of a step term with positive decay rate",
                        ));
                    }
                    let n = term.u_pow + j;
                    let value = &term.coeff / Rational::from_integer((n + 1).into());
                    out.add_coeff(term.t_pow, term.r_pow + n + 1, value);
                }
            }
        }
        Ok(out)
    }

    /// Coefficient of `delta(u - r)` as a polynomial in `t` and `r`.
    ///
    /// Fails on a Dirac term with positive decay rate (its coefficient would
    /// carry `e^{-lambda r}`).
    pub fn dirac_component(&self) -> Result<TPoly, AlgebraError> {
        let mut out = TPoly::zero();
        for term in &self.terms {
            if term.dist != DistFactor::DiracAtR {
                continue;
            }
            if !term.exp_rate.is_zero() {
                return Err(AlgebraError::UnsupportedClass(
                    "Dirac coefficient with positive decay rate is not polynomial",
                ));
            }
            out.add_coeff(term.t_pow, term.r_pow, term.coeff.clone());
        }
        Ok(out)
    }
}
