//! Exact rationals and the mixed exact/approximate length values returned by
//! tree models.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// Parses `"3/2"`, `"0.25"`, `"2"` (or a JSON number) into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Format(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = frac.len() as u32;
        if digits > 15 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let den = 10i64.pow(digits);
        let i: i64 = if int.is_empty() || int == "-" {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let f: i64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        let mag = i.abs() * den + f;
        return Ok(Rational::new(if neg { -mag } else { mag }, den));
    }
    Ok(Rational::from_integer(s.parse().map_err(|_| bad())?))
}

pub fn rational_from_json(v: &serde_json::Value) -> Result<Rational> {
    match v {
        serde_json::Value::String(s) => parse_rational(s),
        serde_json::Value::Number(n) => parse_rational(&n.to_string()),
        other => Err(Error::Format(format!("expected a number, got {other}"))),
    }
}

pub fn format_rational(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A length in a tree model: exact for combinatorial models, a floating point
/// estimate with an error bar for limit trees.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "LengthRepr", try_from = "LengthRepr")]
pub enum Length {
    Exact(Rational),
    Approx { value: f64, error: f64, converged: bool },
}

/// Serialized form of [`Length`]; exact values are written as `"p/q"`.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum LengthRepr {
    Exact { value: String },
    Approx { value: f64, error: f64, converged: bool },
}

impl From<Length> for LengthRepr {
    fn from(l: Length) -> Self {
        match l {
            Length::Exact(r) => LengthRepr::Exact {
                value: format_rational(&r),
            },
            Length::Approx {
                value,
                error,
                converged,
            } => LengthRepr::Approx {
                value,
                error,
                converged,
            },
        }
    }
}

impl TryFrom<LengthRepr> for Length {
    type Error = Error;
    fn try_from(r: LengthRepr) -> Result<Self> {
        Ok(match r {
            LengthRepr::Exact { value } => Length::Exact(parse_rational(&value)?),
            LengthRepr::Approx {
                value,
                error,
                converged,
            } => Length::Approx {
                value,
                error,
                converged,
            },
        })
    }
}

impl Length {
    pub fn zero() -> Self {
        Length::Exact(Rational::zero())
    }

    pub fn exact(n: i64) -> Self {
        Length::Exact(Rational::from_integer(n))
    }

    pub fn value(&self) -> f64 {
        match self {
            Length::Exact(r) => r.to_f64().expect("finite rational"),
            Length::Approx { value, .. } => *value,
        }
    }

    pub fn error(&self) -> f64 {
        match self {
            Length::Exact(_) => 0.0,
            Length::Approx { error, .. } => *error,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Length::Exact(_))
    }

    pub fn converged(&self) -> bool {
        match self {
            Length::Exact(_) => true,
            Length::Approx { converged, .. } => *converged,
        }
    }

    pub fn as_exact(&self) -> Option<Rational> {
        match self {
            Length::Exact(r) => Some(*r),
            Length::Approx { .. } => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Length::Exact(r) => r.is_zero(),
            Length::Approx { value, error, .. } => value.abs() <= *error,
        }
    }

    /// `self < eps`, conservatively for estimates (`value + error < eps`).
    pub fn certainly_less_than(&self, eps: f64) -> bool {
        match self {
            Length::Exact(r) => (*r.numer() as f64) < eps * (*r.denom() as f64),
            Length::Approx { value, error, .. } => value + error < eps,
        }
    }

    /// `self ≤ other + slack`, exactly when both sides are exact.
    pub fn le_with_slack(&self, other: &Length, slack: f64) -> bool {
        match (self, other) {
            (Length::Exact(a), Length::Exact(b)) => a <= b,
            _ => self.value() <= other.value() + slack + self.error() + other.error(),
        }
    }

    pub fn scale(&self, k: i64) -> Length {
        match self {
            Length::Exact(r) => Length::Exact(r * k),
            Length::Approx {
                value,
                error,
                converged,
            } => Length::Approx {
                value: value * k as f64,
                error: error * (k.unsigned_abs() as f64),
                converged: *converged,
            },
        }
    }

    pub fn half(&self) -> Length {
        match self {
            Length::Exact(r) => Length::Exact(r / 2),
            Length::Approx {
                value,
                error,
                converged,
            } => Length::Approx {
                value: value / 2.0,
                error: error / 2.0,
                converged: *converged,
            },
        }
    }

    /// Rendering with fixed precision so reports are byte-stable.
    pub fn render(&self) -> String {
        match self {
            Length::Exact(r) => format_rational(r),
            Length::Approx { value, .. } => format!("{value:.12}"),
        }
    }
}

impl Add for Length {
    type Output = Length;
    fn add(self, rhs: Length) -> Length {
        match (self, rhs) {
            (Length::Exact(a), Length::Exact(b)) => Length::Exact(a + b),
            (a, b) => Length::Approx {
                value: a.value() + b.value(),
                error: a.error() + b.error(),
                converged: a.converged() && b.converged(),
            },
        }
    }
}

impl Sub for Length {
    type Output = Length;
    fn sub(self, rhs: Length) -> Length {
        match (self, rhs) {
            (Length::Exact(a), Length::Exact(b)) => Length::Exact(a - b),
            (a, b) => Length::Approx {
                value: a.value() - b.value(),
                error: a.error() + b.error(),
                converged: a.converged() && b.converged(),
            },
        }
    }
}

impl Mul<i64> for Length {
    type Output = Length;
    fn mul(self, k: i64) -> Length {
        self.scale(k)
    }
}

impl std::iter::Sum for Length {
    fn sum<I: Iterator<Item = Length>>(iter: I) -> Length {
        iter.fold(Length::zero(), |a, b| a + b)
    }
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/2").unwrap(), Rational::new(3, 2));
        assert_eq!(parse_rational("0.25").unwrap(), Rational::new(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), Rational::new(-3, 2));
        assert_eq!(parse_rational("2").unwrap(), Rational::from_integer(2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(
            rational_from_json(&serde_json::json!(0.5)).unwrap(),
            Rational::new(1, 2)
        );
    }

    #[test]
    fn comparisons() {
        let half = Length::Exact(Rational::new(1, 2));
        assert!(half.certainly_less_than(0.6));
        assert!(!half.certainly_less_than(0.5));
        let a = Length::Approx {
            value: 0.4,
            error: 0.05,
            converged: true,
        };
        assert!(a.certainly_less_than(0.5));
        assert!(!a.certainly_less_than(0.44));
        assert_eq!((half + half).render(), "1");
    }

    #[test]
    fn json_form() {
        let l = Length::Exact(Rational::new(3, 2));
        let v = serde_json::to_value(l).unwrap();
        assert_eq!(v, serde_json::json!({"kind": "exact", "value": "3/2"}));
        assert_eq!(serde_json::from_value::<Length>(v).unwrap(), l);
        let a = Length::Approx {
            value: 0.25,
            error: 1e-12,
            converged: true,
        };
        assert_eq!(
            serde_json::from_str::<Length>(&serde_json::to_string(&a).unwrap()).unwrap(),
            a
        );
        assert!(serde_json::from_str::<Length>(r#"{"kind": "exact", "value": "1/0"}"#).is_err());
    }
}
