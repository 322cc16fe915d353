//! Scalar rings used by the algebra kernels.
//!
//! Every formula in the crate (brackets, adjoint series, integral values and
//! gradients) is written once against [`Scalar`] and instantiated with exact
//! rationals, with polynomials in the tangent-bundle coordinates, or with
//! `f64` for the geodesic integrator.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number.
pub type Q = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn from_rational(q: &Q) -> Self;

    fn scale(&self, q: &Q) -> Self {
        self.clone() * Self::from_rational(q)
    }
}

impl Scalar for Q {
    fn from_rational(q: &Q) -> Self {
        q.clone()
    }

    fn scale(&self, q: &Q) -> Self {
        self * q
    }
}

impl Scalar for f64 {
    fn from_rational(q: &Q) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }
}

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `p`, `-p`, `p/q` (surrounding whitespace allowed).
pub fn parse_q(s: &str) -> Result<Q> {
    let t = s.trim();
    let err = || Error::Parse(format!("invalid rational `{s}`"));
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        Ok(Q::new(n, d))
    } else {
        BigInt::from_str(t).map(Q::from_integer).map_err(|_| err())
    }
}

/// `p/q` in lowest terms, or `p` for integers.
pub fn format_q(x: &Q) -> String {
    x.to_string()
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Nearest rational with the given denominator; used for rational sampling.
pub fn q_from_f64_grid(x: f64, denom: i64) -> Q {
    let n = (x * denom as f64).round() as i64;
    qf(n, denom)
}

pub fn abs_q(x: &Q) -> Q {
    x.abs()
}

pub fn is_one(x: &Q) -> bool {
    x.is_one()
}

/// Serde adapter: rationals travel as `"p/q"` strings.
pub mod serde_q {
    use super::{format_q, Q};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let raw = super::RawRational::deserialize(d)?;
        raw.into_q().map_err(serde::de::Error::custom)
    }
}

/// Accepts a rational given as a string or as a JSON/TOML integer.
#[derive(Debug, Clone, serde::Deserialize, serde::Serialize)]
#[serde(untagged)]
pub enum RawRational {
    Int(i64),
    Text(String),
}

impl RawRational {
    pub fn into_q(self) -> Result<Q> {
        match self {
            RawRational::Int(n) => Ok(q(n)),
            RawRational::Text(s) => parse_q(&s),
        }
    }
}

impl From<&Q> for RawRational {
    fn from(x: &Q) -> Self {
        RawRational::Text(format_q(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "1", "-3", "1/2", "-5/12", "10/4"] {
            let x = parse_q(s).unwrap();
            assert_eq!(parse_q(&format_q(&x)).unwrap(), x);
        }
        assert_eq!(format_q(&parse_q("10/4").unwrap()), "5/2");
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("abc").is_err());
    }
}
