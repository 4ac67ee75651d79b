//! Exact rational helpers shared by every module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision exact rational.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `p/q` or a plain integer `p`.
pub fn parse_q(s: &str) -> Result<Q> {
    let bad = || Error::Parse { line: 0, msg: format!("invalid rational `{s}`") };
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::Parse { line: 0, msg: format!("zero denominator in `{s}`") });
    }
    Ok(Q::new(n, d))
}

/// Renders as `p/q`, or `p` for integers.
pub fn fmt_q(x: &Q) -> String {
    x.to_string()
}

/// Greatest common divisor of two non-negative rationals: the largest `g`
/// with `a/g` and `b/g` both integers. `gcd(0, b) = b`.
pub fn gcd_q(a: &Q, b: &Q) -> Q {
    if a.is_zero() {
        return b.abs();
    }
    if b.is_zero() {
        return a.abs();
    }
    let den = a.denom().lcm(b.denom());
    let an = a.numer() * (&den / a.denom());
    let bn = b.numer() * (&den / b.denom());
    Q::new(an.gcd(&bn), den)
}

/// True when `x / h` is an integer.
pub fn divides(h: &Q, x: &Q) -> bool {
    (x / h).is_integer()
}

/// `x / h` as an integer, when exact.
pub fn steps(h: &Q, x: &Q) -> Option<i64> {
    let r = x / h;
    if r.is_integer() {
        r.to_integer().to_i64()
    } else {
        None
    }
}

pub fn is_positive(x: &Q) -> bool {
    x.is_positive()
}

pub fn one() -> Q {
    Q::one()
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn to_i64(x: &Q) -> Option<i64> {
    if x.is_integer() {
        x.to_integer().to_i64()
    } else {
        None
    }
}

/// Reduces `x` into `[0, m)`.
pub fn rem_euclid(x: &Q, m: &Q) -> Q {
    let k = (x / m).floor();
    x - k * m
}
