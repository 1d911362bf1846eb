//! High-precision decimal reals for logarithms of exact quantities.
//!
//! Everything that can stay rational does; values here only exist after a
//! logarithm has been taken. Precision is in significant decimal digits.

use dashu_float::ops::Abs;
use dashu_float::DBig;
use dashu_int::{IBig, UBig};
use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

pub type Real = DBig;

/// Default working precision in significant digits.
pub const DEFAULT_DIGITS: usize = 50;

/// Absolute tolerance exponent used for equality checks between
/// independently computed reals: `10^-30`.
pub const TOLERANCE_EXP: isize = -30;

const GUARD_DIGITS: usize = 12;

fn ubig(n: &BigUint) -> UBig {
    UBig::from_le_bytes(&n.to_bytes_le())
}

pub fn ibig(n: &BigInt) -> IBig {
    let mag = IBig::from(ubig(n.magnitude()));
    match n.sign() {
        Sign::Minus => -mag,
        _ => mag,
    }
}

pub fn from_int(n: &BigInt, digits: usize) -> Real {
    Real::from(ibig(n))
        .with_precision(digits + GUARD_DIGITS)
        .value()
}

pub fn from_i64(n: i64, digits: usize) -> Real {
    from_int(&BigInt::from(n), digits)
}

pub fn from_rational(q: &Rational, digits: usize) -> Real {
    from_int(q.numer(), digits) / from_int(q.denom(), digits)
}

/// Natural logarithm of a positive rational.
pub fn ln_rational(q: &Rational, digits: usize) -> Result<Real> {
    if !q.is_positive() {
        return Err(Error::InvalidArgument(format!(
            "logarithm of non-positive value {q}"
        )));
    }
    Ok(from_rational(q, digits).ln())
}

pub fn ln_biguint(n: &BigUint, digits: usize) -> Result<Real> {
    if n.is_zero() {
        return Err(Error::InvalidArgument("logarithm of zero".into()));
    }
    Ok(from_int(&BigInt::from(n.clone()), digits).ln())
}

pub fn tolerance() -> Real {
    Real::from_parts(IBig::from(1), TOLERANCE_EXP)
}

pub fn abs(x: &Real) -> Real {
    x.clone().abs()
}

/// `|a - b| < 10^-30`.
pub fn approx_eq(a: &Real, b: &Real) -> bool {
    abs(&(a - b)) < tolerance()
}

pub fn to_f64(x: &Real) -> f64 {
    x.to_f64().value()
}

/// Decimal rendering rounded to `digits` significant digits.
pub fn to_decimal_string(x: &Real, digits: usize) -> String {
    x.clone().with_precision(digits).value().to_string()
}
