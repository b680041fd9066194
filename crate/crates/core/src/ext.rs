//! Nonnegative extended reals: `[0, ∞]` with `∞` as an ordinary value.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Tolerance for claims that hold exactly in real arithmetic.
pub const EXACT_TOL: f64 = 1e-12;

/// A value in `[0, ∞]`. Never NaN, never negative.
#[derive(Clone, Copy, PartialEq, Default)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal(0.0);
    pub const INFINITY: ExtReal = ExtReal(f64::INFINITY);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "extended real must be nonnegative, got {value}"
            )));
        }
        // -0.0 normalizes to 0.0 so that equality is structural
        Ok(ExtReal(value + 0.0))
    }

    /// Caller guarantees `value` is nonnegative and not NaN.
    pub(crate) fn from_f64_unchecked(value: f64) -> Self {
        debug_assert!(value >= 0.0, "{value}");
        ExtReal(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Equality up to an absolute/relative tolerance; `∞` only matches `∞`.
    pub fn approx_eq(self, other: Self, tol: f64) -> bool {
        match (self.is_finite(), other.is_finite()) {
            (true, true) => {
                (self.0 - other.0).abs() <= tol * self.0.abs().max(other.0.abs()).max(1.0)
            }
            (false, false) => true,
            _ => false,
        }
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        // both operands are non-NaN by construction
        self.0.partial_cmp(&other.0).unwrap_or(Ordering::Equal)
    }
}

impl Add for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: Self) -> Self {
        ExtReal(self.0 + rhs.0)
    }
}

impl std::iter::Sum for ExtReal {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(ExtReal::ZERO, |a, b| a + b)
    }
}

impl TryFrom<f64> for ExtReal {
    type Error = Error;
    fn try_from(value: f64) -> Result<Self> {
        ExtReal::new(value)
    }
}

impl From<ExtReal> for f64 {
    fn from(x: ExtReal) -> f64 {
        x.0
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// 17 significant digits in scientific notation (`1.0000000000000000e0`); `inf` for infinity.
pub fn format_f64(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{:.16e}", x)
}

/// Infinity is serialized as the string "inf" since JSON has no such number.
impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        let v = match Repr::deserialize(d)? {
            Repr::Num(x) => x,
            Repr::Str(s) if s == "inf" || s == "Infinity" => f64::INFINITY,
            Repr::Str(s) => {
                return Err(serde::de::Error::custom(format!("bad extended real `{s}`")))
            }
        };
        ExtReal::new(v).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_negative_and_nan() {
        assert!(ExtReal::new(-1e-300).is_err());
        assert!(ExtReal::new(f64::NAN).is_err());
        assert!(ExtReal::new(f64::NEG_INFINITY).is_err());
        assert_eq!(ExtReal::new(-0.0).unwrap(), ExtReal::ZERO);
    }

    #[test]
    fn infinity_absorbs_and_dominates() {
        let x = ExtReal::new(5.0).unwrap();
        assert_eq!(x + ExtReal::INFINITY, ExtReal::INFINITY);
        assert!(ExtReal::INFINITY > ExtReal::new(f64::MAX).unwrap());
        assert_eq!(x.min(ExtReal::INFINITY), x);
        assert_eq!(x.max(ExtReal::INFINITY), ExtReal::INFINITY);
    }

    #[test]
    fn json_round_trip_of_infinity() {
        let v = vec![ExtReal::new(0.5).unwrap(), ExtReal::INFINITY];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"[0.5,"inf"]"#);
        let back: Vec<ExtReal> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn formatting_round_trips() {
        for x in [0.1, 1.0 / 3.0, 2.0f64.sqrt() * 2.0, 1e-300, 6.0] {
            assert_eq!(format_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_f64(f64::INFINITY), "inf");
    }
}
