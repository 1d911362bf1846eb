//! Exact rational helpers and the canonical `"p/q"` text form.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn from_biguint(n: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(n.clone()))
}

/// `x^k` for a possibly negative exponent.
pub fn pow(x: &Rational, k: i64) -> Rational {
    if k >= 0 {
        num_traits::pow(x.clone(), k as usize)
    } else {
        num_traits::pow(x.recip(), (-k) as usize)
    }
}

/// Canonical `p/q` with `q > 0` and `gcd(p, q) = 1`; integers keep `/1`.
pub fn to_pq(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse_pq(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidArgument(format!("not a rational in p/q form: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(
            BigInt::from_str(s).map_err(|_| bad())?,
        )),
    }
}

/// Sign character used in reports.
pub fn sign_char(x: &Rational) -> char {
    if x.is_zero() {
        '0'
    } else if x.is_positive() {
        '+'
    } else {
        '-'
    }
}

pub fn is_one(x: &Rational) -> bool {
    x.is_one()
}

/// Serde wrapper emitting a rational as its canonical `"p/q"` string.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pq(pub Rational);

impl fmt::Debug for Pq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&to_pq(&self.0))
    }
}

impl fmt::Display for Pq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&to_pq(&self.0))
    }
}

impl From<Rational> for Pq {
    fn from(x: Rational) -> Self {
        Pq(x)
    }
}

impl Serialize for Pq {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&to_pq(&self.0))
    }
}

impl<'de> Deserialize<'de> for Pq {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_pq(&s).map(Pq).map_err(serde::de::Error::custom)
    }
}
