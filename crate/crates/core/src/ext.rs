//! Nonnegative extended reals: an exact rational or a binary float, plus `+inf`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::rational::{format_rational, parse_rational, rational_from_f64, rational_to_f64, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtRealError {
    #[error("cannot compare an exact rational with a binary float (regime mixing)")]
    RegimeMix,
    #[error("negative distance payload {0}")]
    Negative(String),
    #[error("NaN is not a distance")]
    NotANumber,
    #[error("invalid extended real literal '{0}'")]
    Parse(String),
}

/// Which arithmetic a finite value lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Exact,
    Float,
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Exact(Rational),
    Float(f64),
    Infinite,
}

/// A distance, radius or diameter value. Never negative, never NaN.
///
/// `+inf` is shared by both regimes; finite values of different regimes do not compare.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtReal(Repr);

impl ExtReal {
    pub const INFINITY: ExtReal = ExtReal(Repr::Infinite);

    pub fn exact(q: Rational) -> Result<Self, ExtRealError> {
        if q.is_negative() {
            return Err(ExtRealError::Negative(format_rational(&q)));
        }
        Ok(ExtReal(Repr::Exact(q)))
    }

    /// Builds a float value; `f64::INFINITY` maps to `+inf`.
    pub fn float(x: f64) -> Result<Self, ExtRealError> {
        if x.is_nan() {
            return Err(ExtRealError::NotANumber);
        }
        if x < 0.0 {
            return Err(ExtRealError::Negative(format!("{x:?}")));
        }
        if x.is_infinite() {
            return Ok(ExtReal::INFINITY);
        }
        // -0.0 compares equal to 0.0 but prints differently.
        Ok(ExtReal(Repr::Float(if x == 0.0 { 0.0 } else { x })))
    }

    pub fn zero_exact() -> Self {
        ExtReal(Repr::Exact(Rational::zero()))
    }

    pub fn zero_float() -> Self {
        ExtReal(Repr::Float(0.0))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self.0, Repr::Infinite)
    }

    pub fn is_finite(&self) -> bool {
        !self.is_infinite()
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Exact(q) => q.is_zero(),
            Repr::Float(x) => *x == 0.0,
            Repr::Infinite => false,
        }
    }

    /// `None` for `+inf`, which belongs to both regimes.
    pub fn regime(&self) -> Option<Regime> {
        match self.0 {
            Repr::Exact(_) => Some(Regime::Exact),
            Repr::Float(_) => Some(Regime::Float),
            Repr::Infinite => None,
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match &self.0 {
            Repr::Exact(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_float(&self) -> Option<f64> {
        match self.0 {
            Repr::Float(x) => Some(x),
            _ => None,
        }
    }

    /// Lossy view as `f64` regardless of regime; `+inf` becomes `f64::INFINITY`.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Exact(q) => rational_to_f64(q),
            Repr::Float(x) => *x,
            Repr::Infinite => f64::INFINITY,
        }
    }

    /// Explicit conversion into the float regime.
    pub fn to_float_regime(&self) -> ExtReal {
        match &self.0 {
            Repr::Exact(q) => ExtReal(Repr::Float(rational_to_f64(q))),
            _ => self.clone(),
        }
    }

    /// Explicit conversion into the exact regime via the shortest round-trip decimal.
    pub fn to_exact_regime(&self) -> ExtReal {
        match &self.0 {
            Repr::Float(x) => ExtReal(Repr::Exact(rational_from_f64(*x).expect("finite float"))),
            _ => self.clone(),
        }
    }

    /// Sum of two same-regime values; `+inf` absorbs.
    pub fn add(&self, other: &ExtReal) -> Result<ExtReal, ExtRealError> {
        match (&self.0, &other.0) {
            (Repr::Infinite, _) | (_, Repr::Infinite) => Ok(ExtReal::INFINITY),
            (Repr::Exact(a), Repr::Exact(b)) => Ok(ExtReal(Repr::Exact(a + b))),
            (Repr::Float(a), Repr::Float(b)) => ExtReal::float(a + b),
            _ => Err(ExtRealError::RegimeMix),
        }
    }
}

impl PartialOrd for ExtReal {
    /// `None` exactly when two finite values come from different regimes.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        ext_cmp(self, other).ok()
    }
}

pub fn ext_cmp(a: &ExtReal, b: &ExtReal) -> Result<Ordering, ExtRealError> {
    match (&a.0, &b.0) {
        (Repr::Infinite, Repr::Infinite) => Ok(Ordering::Equal),
        (Repr::Infinite, _) => Ok(Ordering::Greater),
        (_, Repr::Infinite) => Ok(Ordering::Less),
        (Repr::Exact(x), Repr::Exact(y)) => Ok(x.cmp(y)),
        (Repr::Float(x), Repr::Float(y)) => Ok(x.total_cmp(y)),
        _ => Err(ExtRealError::RegimeMix),
    }
}

pub fn ext_min(a: &ExtReal, b: &ExtReal) -> Result<ExtReal, ExtRealError> {
    Ok(match ext_cmp(a, b)? {
        Ordering::Greater => b.clone(),
        _ => a.clone(),
    })
}

pub fn ext_max(a: &ExtReal, b: &ExtReal) -> Result<ExtReal, ExtRealError> {
    Ok(match ext_cmp(a, b)? {
        Ordering::Less => b.clone(),
        _ => a.clone(),
    })
}

/// Minimum of a nonempty iterator; `+inf` for an empty one.
pub fn ext_min_all<'a>(values: impl IntoIterator<Item = &'a ExtReal>) -> Result<ExtReal, ExtRealError> {
    values
        .into_iter()
        .try_fold(ExtReal::INFINITY, |acc, v| ext_min(&acc, v))
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Exact(q) => f.write_str(&format_rational(q)),
            Repr::Float(x) => write!(f, "{x:?}"),
            Repr::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtReal {
    type Err = ExtRealError;

    /// `inf`, `p/q` or an integer (exact), anything with `.` or an exponent (float).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t == "inf" || t == "+inf" {
            return Ok(ExtReal::INFINITY);
        }
        let bad = || ExtRealError::Parse(t.to_string());
        if t.contains(['.', 'e', 'E']) && !t.contains('/') {
            let x: f64 = t.parse().map_err(|_| bad())?;
            if x.is_infinite() {
                return Err(bad());
            }
            return ExtReal::float(x);
        }
        let q = parse_rational(t).map_err(|_| bad())?;
        ExtReal::exact(q)
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
