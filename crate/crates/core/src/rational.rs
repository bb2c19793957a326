//! Exact rational helpers. Geometry never touches floating point.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Small exact rational used for `eps`-style parameters.
pub type Q = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse `{0}` as a rational (expected p/q, an integer or a decimal)")]
pub struct ParseQError(pub String);

/// Parses `p/q`, `p` or a finite decimal such as `0.125`.
pub fn parse_q(s: &str) -> Result<Q, ParseQError> {
    let t = s.trim();
    let err = || ParseQError(s.to_string());
    if let Some((a, b)) = t.split_once('/') {
        let n: i64 = a.trim().parse().map_err(|_| err())?;
        let d: i64 = b.trim().parse().map_err(|_| err())?;
        if d == 0 {
            return Err(err());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        if fp.is_empty() || fp.len() > 15 || !fp.bytes().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let neg = ip.starts_with('-');
        let ip_val: i64 = if ip.is_empty() || ip == "-" { 0 } else { ip.parse().map_err(|_| err())? };
        let den = 10i64.pow(fp.len() as u32);
        let frac: i64 = fp.parse().map_err(|_| err())?;
        let num = ip_val.abs() * den + frac;
        return Ok(Q::new(if neg { -num } else { num }, den));
    }
    t.parse::<i64>().map(Q::from_integer).map_err(|_| err())
}

pub fn fmt_q(q: &Q) -> String {
    if *q.denom() == 1 {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// `floor(r * n)`.
pub fn floor_mul(r: Q, n: i64) -> i64 {
    let v = (*r.numer() as i128) * (n as i128);
    Integer::div_floor(&v, &(*r.denom() as i128)) as i64
}

/// `ceil(r * n)`.
pub fn ceil_mul(r: Q, n: i64) -> i64 {
    let v = (*r.numer() as i128) * (n as i128);
    Integer::div_ceil(&v, &(*r.denom() as i128)) as i64
}

/// `a <= r * n` exactly.
pub fn le_mul(a: i64, r: Q, n: i64) -> bool {
    (a as i128) * (*r.denom() as i128) <= (*r.numer() as i128) * (n as i128)
}

/// `a < r * n` exactly.
pub fn lt_mul(a: i64, r: Q, n: i64) -> bool {
    (a as i128) * (*r.denom() as i128) < (*r.numer() as i128) * (n as i128)
}

pub fn q_to_big(q: Q) -> BigRational {
    BigRational::new(BigInt::from(*q.numer()), BigInt::from(*q.denom()))
}

/// A non-negative power `base^exp` of a rational, kept symbolic so that the
/// cubic threshold ladder never has to materialise astronomically small values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Power {
    pub base: Q,
    pub exp: u64,
}

impl Power {
    pub fn new(base: Q, exp: u64) -> Self {
        Power { base, exp }
    }

    pub fn of(q: Q) -> Self {
        Power { base: q, exp: 1 }
    }

    /// `base^exp` is provably below `2^-bits` without computing it.
    fn below_two_pow(&self, bits: u64) -> bool {
        self.base * 2 <= Q::one() && self.exp > bits
    }

    pub fn to_big(&self) -> Option<BigRational> {
        if self.below_two_pow(4096) {
            return None;
        }
        let b = q_to_big(self.base);
        Some(num_traits::pow::pow(b, self.exp as usize))
    }

    /// Compares `dim` against `self * n`.
    pub fn cmp_scaled(&self, dim: i64, n: i64) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        if self.below_two_pow(127) && n < (1i64 << 62) {
            // self * n < 2^-127 * 2^62 < 1 <= dim
            return if dim > 0 { Ordering::Greater } else { dim.cmp(&0) };
        }
        let v = self.to_big().expect("power within materialisable range") * BigInt::from(n);
        BigRational::from_integer(BigInt::from(dim)).cmp(&v)
    }

    pub fn dim_le(&self, dim: i64, n: i64) -> bool {
        self.cmp_scaled(dim, n) != std::cmp::Ordering::Greater
    }

    pub fn dim_gt(&self, dim: i64, n: i64) -> bool {
        self.cmp_scaled(dim, n) == std::cmp::Ordering::Greater
    }
}

impl fmt::Display for Power {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 1 {
            return write!(f, "{}", fmt_q(&self.base));
        }
        match self.to_big() {
            Some(v) if v.numer().bits() + v.denom().bits() <= 256 => write!(f, "{}", fmt_big(&v)),
            _ => write!(f, "({})^{}", fmt_q(&self.base), self.exp),
        }
    }
}

pub fn fmt_big(v: &BigRational) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// `a <= r * n` for a big rational `r`.
pub fn big_le_mul(a: i64, r: &BigRational, n: i64) -> bool {
    BigRational::from_integer(BigInt::from(a)) <= r * BigInt::from(n)
}

pub fn big_floor_mul(r: &BigRational, n: i64) -> i64 {
    let v = r * BigInt::from(n);
    v.floor().to_integer().to_i64().unwrap_or(i64::MAX)
}

pub fn is_positive_big(r: &BigRational) -> bool {
    r.is_positive() && !r.is_zero()
}

/// Serde adapter that writes a [`Q`] as the string `"p/q"`.
pub mod q_string {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Q, s: S) -> Result<S::Ok, S::Error> {
        fmt_q(q).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        Q::from_str(&s).or_else(|_| parse_q(&s)).map_err(serde::de::Error::custom)
    }
}
