//! Arbitrary-precision rational scalars and the few numeric helpers the
//! symbolic layer needs.
//!
//! `Rational` is `num_rational::BigRational`: always reduced, denominator
//! positive, zero stored as `0/1` — exactly the invariants the coefficient
//! field relies on.

use std::sync::Mutex;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

/// Rational from an integer.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational `n/d`. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `n!` as a big integer, memoized (factorials are the inner loop of every
/// integral transform).
pub fn factorial(n: u32) -> BigInt {
    static CACHE: Mutex<Vec<BigInt>> = Mutex::new(Vec::new());
    let mut cache = CACHE.lock().expect("factorial cache");
    if cache.is_empty() {
        cache.push(BigInt::one());
    }
    while cache.len() <= n as usize {
        let next = cache.last().expect("nonempty") * cache.len();
        cache.push(next);
    }
    cache[n as usize].clone()
}

/// Falling product `n! / j!` for `j <= n`.
pub fn falling_factorial(n: u32, j: u32) -> BigInt {
    debug_assert!(j <= n);
    let mut acc = BigInt::one();
    for k in (u64::from(j) + 1)..=u64::from(n) {
        acc *= k;
    }
    acc
}

/// Nonnegative integer power.
pub fn pow_u32(base: &Rational, exp: u32) -> Rational {
    let mut acc = Rational::one();
    let mut sq = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &sq;
        }
        e >>= 1;
        if e > 0 {
            sq = &sq * &sq;
        }
    }
    acc
}

/// Parses a decimal literal (`-1.25`, `0.4e-3`, `7`) or a fraction (`3/4`)
/// into an exact rational. Returns `None` on malformed input.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().ok()?;
        let d: BigInt = den.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    let (mantissa, exp10) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let joined = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(joined.parse::<BigInt>().ok()?);
    let shift = exp10 - frac_part.len() as i32;
    let ten = rat_int(10);
    if shift >= 0 {
        value *= pow_u32(&ten, shift as u32);
    } else {
        value /= pow_u32(&ten, (-shift) as u32);
    }
    if sign < 0 {
        value = -value;
    }
    Some(value)
}

/// Formats a rational back to a literal `parse_rational` accepts: a plain
/// decimal when the denominator is of the form `2^a 5^b`, else `n/d`.
pub fn format_rational(x: &Rational) -> String {
    let denom = x.denom();
    let mut d = denom.to_biguint().expect("denominator is positive");
    let mut twos = 0u32;
    let two = BigUint::from(2u32);
    let five = BigUint::from(5u32);
    while (&d % &two).is_zero() {
        d /= &two;
        twos += 1;
    }
    let mut fives = 0u32;
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return format!("{}/{}", x.numer(), x.denom());
    }
    // scale to an integer over a power of ten
    let digits = twos.max(fives);
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = (x * Rational::from_integer(scale)).to_integer();
    let neg = scaled.is_negative();
    let mag = scaled.magnitude().to_string();
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    let digits = digits as usize;
    if digits == 0 {
        out.push_str(&mag);
    } else if mag.len() > digits {
        let (int_part, frac_part) = mag.split_at(mag.len() - digits);
        out.push_str(int_part);
        out.push('.');
        out.push_str(frac_part);
    } else {
        out.push_str("0.");
        for _ in 0..digits - mag.len() {
            out.push('0');
        }
        out.push_str(&mag);
    }
    out
}

/// Rounds to the nearest `f64`, robust to magnitudes far outside the
/// representable range of a direct numerator/denominator division.
pub fn to_f64(x: &Rational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let sign = if x.is_negative() { -1.0 } else { 1.0 };
    let num = x.numer().magnitude();
    let den = x.denom().magnitude();
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    // Scale so the integer quotient keeps ~64 significant bits.
    let excess = nb - db - 64;
    let q = if excess >= 0 {
        num / (den << excess as u64)
    } else {
        (num << (-excess) as u64) / den
    };
    let q = q.to_f64().expect("quotient fits in 64-ish bits");
    if excess > 1023 {
        return sign * f64::INFINITY;
    }
    sign * q * f64::powi(2.0, excess as i32)
}
