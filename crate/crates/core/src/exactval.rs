//! Extended rationals and base-`p` digit combinatorics.
//!
//! Every valuation in the crate is an [`Extended`] value: a finite scalar or
//! `+inf`, the valuation of zero. Binomial valuations come from Kummer's
//! theorem, counting carries in base `p`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::Rational;

/// A scalar extended by a maximal element `Infinity`.
///
/// Variant order matters: the derived ordering puts every finite value below
/// `Infinity`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Extended<T> {
    Finite(T),
    Infinity,
}

impl<T> Extended<T> {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinity)
    }

    pub fn is_finite(&self) -> bool {
        !self.is_infinite()
    }

    pub fn finite(&self) -> Option<&T> {
        match self {
            Extended::Finite(t) => Some(t),
            Extended::Infinity => None,
        }
    }

    pub fn into_finite(self) -> Option<T> {
        match self {
            Extended::Finite(t) => Some(t),
            Extended::Infinity => None,
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Extended<U> {
        match self {
            Extended::Finite(t) => Extended::Finite(f(t)),
            Extended::Infinity => Extended::Infinity,
        }
    }
}

impl<T: Ord + Clone> Extended<T> {
    pub fn min_of(&self, other: &Self) -> Self {
        match self.cmp(other) {
            Ordering::Greater => other.clone(),
            _ => self.clone(),
        }
    }
}

impl<T: Clone + std::ops::Mul<Output = T>> Extended<T> {
    /// Multiplies a finite value by `k`; `Infinity` absorbs.
    pub fn scale(&self, k: &T) -> Self {
        match self {
            Extended::Finite(t) => Extended::Finite(t.clone() * k.clone()),
            Extended::Infinity => Extended::Infinity,
        }
    }
}

impl<T> From<T> for Extended<T> {
    fn from(t: T) -> Self {
        Extended::Finite(t)
    }
}

impl<T: Add<Output = T>> Add for Extended<T> {
    type Output = Extended<T>;

    fn add(self, rhs: Self) -> Self::Output {
        match (self, rhs) {
            (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a + b),
            _ => Extended::Infinity,
        }
    }
}

impl<T: fmt::Display> fmt::Display for Extended<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(t) => t.fmt(f),
            Extended::Infinity => f.write_str("inf"),
        }
    }
}

impl<T: FromStr> FromStr for Extended<T> {
    type Err = T::Err;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "+inf" | "Infinity" => Ok(Extended::Infinity),
            other => other.parse().map(Extended::Finite),
        }
    }
}

impl<T: fmt::Display> Serialize for Extended<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Extended<Rational> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        deserializer.deserialize_any(RationalVisitor { allow_inf: true })
    }
}

/// Parses `"a/b"`, `"a"` or (when allowed) `"inf"` into an extended rational.
pub fn parse_extended(s: &str) -> Result<Extended<Rational>> {
    let t = s.trim();
    if matches!(t, "inf" | "+inf" | "Infinity") {
        return Ok(Extended::Infinity);
    }
    parse_rational(t).map(Extended::Finite)
}

/// Parses `"a/b"` or `"a"` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::InvalidInput(format!("'{s}' is not a rational of the form a or a/b"));
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::InvalidInput(format!("'{s}' has a zero denominator")));
    }
    Ok(Rational::new(num, den))
}

struct RationalVisitor {
    allow_inf: bool,
}

impl<'de> Visitor<'de> for RationalVisitor {
    type Value = Extended<Rational>;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a rational as a string \"a/b\" or \"a\", or an integer")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Self::Value, E> {
        let parsed = parse_extended(v).map_err(E::custom)?;
        if parsed.is_infinite() && !self.allow_inf {
            return Err(E::custom("infinite value not allowed here"));
        }
        Ok(parsed)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Self::Value, E> {
        Ok(Extended::Finite(Rational::from_integer(v.into())))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Self::Value, E> {
        Ok(Extended::Finite(Rational::from_integer(v.into())))
    }
}

/// Serde adapter for plain rationals written as `"a/b"` strings.
pub mod ratstr {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(r)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        d.deserialize_any(RationalVisitor { allow_inf: false })
            .map(|e| e.into_finite().expect("visitor rejects infinity"))
    }

    /// Same as the parent adapter for `Option<Rational>`.
    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(
            r: &Option<Rational>,
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            match r {
                Some(r) => s.collect_str(r),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Option<Rational>, D::Error> {
            let v: Option<Extended<Rational>> = Option::deserialize(d)?;
            match v {
                None => Ok(None),
                Some(Extended::Finite(r)) => Ok(Some(r)),
                Some(Extended::Infinity) => Err(de::Error::custom("infinite value not allowed here")),
            }
        }
    }

    /// Adapter for `Vec<Rational>`.
    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&r.to_string())?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<Rational>, D::Error> {
            let v: Vec<Extended<Rational>> = Vec::deserialize(d)?;
            v.into_iter()
                .map(|e| {
                    e.into_finite()
                        .ok_or_else(|| de::Error::custom("infinite value not allowed here"))
                })
                .collect()
        }
    }
}

/// Deterministic trial-division primality test; `p` is always small here.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Exponent of the prime `p` in `n` (`n > 0`).
pub fn padic_valuation(mut n: u64, p: u64) -> u32 {
    debug_assert!(n > 0 && p > 1);
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

/// Number of carries when adding `i` and `j - i` in base `p`, which by
/// Kummer's theorem is the `p`-adic valuation of `binomial(j, i)`.
pub fn kummer_carries(j: u64, i: u64, p: u64) -> Result<u32> {
    if i > j {
        return Err(Error::InvalidInput(format!("binomial index i = {i} exceeds j = {j}")));
    }
    if !is_prime(p) {
        return Err(Error::InvalidInput(format!("p = {p} is not prime")));
    }
    let (mut a, mut b) = (i, j - i);
    let mut carry = 0u64;
    let mut carries = 0u32;
    while a > 0 || b > 0 || carry > 0 {
        let digit_sum = a % p + b % p + carry;
        carry = u64::from(digit_sum >= p);
        carries += carry as u32;
        a /= p;
        b /= p;
    }
    Ok(carries)
}

/// Valuation of `binomial(j, i)` in a field where `v(p) = v_p`.
pub fn binom_valuation(
    j: u64,
    i: u64,
    p: u64,
    v_p: &Extended<Rational>,
) -> Result<Extended<Rational>> {
    let vp = match v_p {
        Extended::Finite(v) if v.is_positive() => v,
        _ => {
            return Err(Error::InvalidInput(format!(
                "v(p) must be a positive rational, got {v_p}"
            )))
        }
    };
    let c = kummer_carries(j, i, p)?;
    Ok(Extended::Finite(vp * Rational::from_integer(c.into())))
}

/// Smallest integer `>= r`.
pub fn ceil_to_u64(r: &Rational) -> Result<u64> {
    let c = r.ceil().to_integer();
    u64::try_from(c.clone()).map_err(|_| Error::Overflow(format!("ceil({r}) = {c} does not fit u64")))
}

pub(crate) fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

#[cfg(test)]
pub(crate) fn rat_frac(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub(crate) fn pow_rat(base: u64, exp: usize) -> Rational {
    let mut acc = BigInt::one();
    for _ in 0..exp {
        acc *= base;
    }
    Rational::from_integer(acc)
}
