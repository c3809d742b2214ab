//! Exact rational helpers shared by the schedule builders and the formula evaluators.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational used for every exact computation in the crate.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("decimal literal `{0}` rejected, write it as p/q")]
    Decimal(String),
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Parses `p/q` or a bare integer `p`. Decimal notation is refused so that
/// every construction parameter stays exact.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    if text.contains('.') || text.contains('e') || text.contains('E') {
        return Err(ParseRationalError::Decimal(text.to_string()));
    }
    let parse_int = |s: &str| -> Result<BigInt, ParseRationalError> {
        let s = s.trim();
        if s.is_empty() || !s.trim_start_matches(['-', '+']).chars().all(|c| c.is_ascii_digit()) {
            return Err(ParseRationalError::Malformed(text.to_string()));
        }
        s.parse::<BigInt>().map_err(|_| ParseRationalError::Malformed(text.to_string()))
    };
    match text.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(text)?)),
        Some((p, q)) => {
            let p = parse_int(p)?;
            let q = parse_int(q)?;
            if q.is_zero() {
                return Err(ParseRationalError::ZeroDenominator(text.to_string()));
            }
            Ok(Rational::new(p, q))
        }
    }
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn from_u64(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `base^exp` for any integer exponent (negative exponents invert).
pub fn pow(base: &Rational, exp: i64) -> Rational {
    let mut acc = Rational::one();
    let mut b = if exp < 0 { base.recip() } else { base.clone() };
    let mut e = exp.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        b = &b * &b;
        e >>= 1;
    }
    acc
}

/// Floor of a nonnegative rational, if it fits in `u64`.
pub fn floor_u64(r: &Rational) -> Option<u64> {
    if r.is_negative() {
        return None;
    }
    r.numer().div_floor(r.denom()).to_u64()
}

/// Largest integer `L` with `base^L <= x`, i.e. `floor(log_base(x))`, found by
/// walking exact powers. Requires `base > 1` and `x > 0`.
pub fn floor_log(base: &Rational, x: &Rational) -> i64 {
    assert!(base > &Rational::one(), "floor_log needs base > 1");
    assert!(x.is_positive(), "floor_log needs x > 0");
    let one = Rational::one();
    let mut l: i64 = 0;
    if x >= &one {
        let mut p = base.clone();
        while &p <= x {
            p *= base;
            l += 1;
        }
    } else {
        let mut p = one;
        while &p > x {
            p /= base;
            l -= 1;
        }
    }
    l
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Decimal rendering with a fixed number of significant digits.
pub struct Decimal<'a>(pub &'a Rational, pub usize);

impl fmt::Display for Decimal<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let value = to_f64(self.0);
        if value == 0.0 || !value.is_finite() {
            return write!(f, "{value}");
        }
        let magnitude = value.abs().log10().floor() as i64;
        let decimals = (self.1 as i64 - 1 - magnitude).max(0) as usize;
        write!(f, "{value:.decimals$}")
    }
}

/// Exact `p/q` rendering (integers print without a denominator).
pub fn display(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
