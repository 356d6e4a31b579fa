use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

pub type Rational = Rational64;

/// A utility value: an exact rational or the bottom element `-inf`.
///
/// The derived ordering places `NegInf` below every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtValue {
    NegInf,
    Finite(Rational),
}

impl ExtValue {
    pub const ZERO: ExtValue = ExtValue::Finite(Rational64::new_raw(0, 1));

    pub fn int(v: i64) -> Self {
        ExtValue::Finite(Rational::from_integer(v))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        ExtValue::Finite(Rational::new(n, d))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtValue::Finite(_))
    }

    pub fn finite(&self) -> Option<Rational> {
        match self {
            ExtValue::Finite(r) => Some(*r),
            ExtValue::NegInf => None,
        }
    }
}

impl From<Rational> for ExtValue {
    fn from(r: Rational) -> Self {
        ExtValue::Finite(r)
    }
}

impl From<i64> for ExtValue {
    fn from(v: i64) -> Self {
        ExtValue::int(v)
    }
}

impl fmt::Display for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtValue::NegInf => f.write_str("-inf"),
            ExtValue::Finite(r) => write!(f, "{r}"),
        }
    }
}

pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let t = s.trim();
    let bad = || Error::BadRational(s.to_string());
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: i64 = n.parse().map_err(|_| bad())?;
    let d: i64 = d.parse().map_err(|_| bad())?;
    if d == 0 {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

impl FromStr for ExtValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "-inf" | "-Inf" | "-infinity" => Ok(ExtValue::NegInf),
            t => parse_rational(t).map(ExtValue::Finite),
        }
    }
}

impl Serialize for ExtValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExtValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RationalRepr::deserialize(deserializer)?;
        match raw {
            RationalRepr::Int(v) => Ok(ExtValue::int(v)),
            RationalRepr::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Rationals travel as `"p/q"` strings; bare JSON integers are accepted on input.
#[derive(Deserialize)]
#[serde(untagged)]
enum RationalRepr {
    Int(i64),
    Str(String),
}

pub mod rational_serde {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(r)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Rational, D::Error> {
        match RationalRepr::deserialize(deserializer)? {
            RationalRepr::Int(v) => Ok(Rational::from_integer(v)),
            RationalRepr::Str(s) => parse_rational(&s).map_err(serde::de::Error::custom),
        }
    }
}
