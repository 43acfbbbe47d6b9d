//! Number types the solver runs over.
//!
//! Every computation in the crate is generic over [`Scalar`], which is
//! implemented for `f64` (fast, approximate) and [`Rational`] (exact,
//! arbitrary precision). Exact mode is the default for correctness checks on
//! small instances.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Signed
    + Send
    + Sync
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + for<'a> std::ops::AddAssign<&'a Self>
    + 'static
{
    /// True when arithmetic is exact.
    const EXACT: bool;

    fn from_u64(n: u64) -> Self;

    /// Converts a float. Exact mode converts the shortest decimal that
    /// round-trips, so `0.99` becomes `99/100` rather than the binary value.
    fn from_f64(x: f64) -> Self;

    /// Parses `"12"`, `"-0.99"`, `"1.5e3"` or `"22/7"`.
    fn parse(s: &str) -> Result<Self>;

    fn to_f64(&self) -> f64;

    /// Comparison slack: zero in exact mode.
    fn slack() -> Self;

    fn ratio(num: u64, den: u64) -> Self {
        Self::from_u64(num) / Self::from_u64(den)
    }

    fn powi(&self, exp: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..exp {
            out = out * self.clone();
        }
        out
    }

    fn approx_eq(&self, other: &Self, tol: &Self) -> bool {
        (self.clone() - other.clone()).abs() <= tol.clone()
    }

    /// `self < other` beyond the comparison slack.
    fn definitely_less(&self, other: &Self) -> bool {
        self.clone() + Self::slack() < other.clone()
    }

    /// Exact rationals as `"p/q"` strings, floats as JSON numbers.
    fn to_json(&self) -> Value;

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => Self::parse(s),
            Value::Number(n) => Self::parse(&n.to_string()),
            other => Err(Error::Parse(format!("expected a number, got {other}"))),
        }
    }

    /// Human-readable rendering: full fraction in exact mode, 6 significant
    /// digits otherwise.
    fn pretty(&self) -> String;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_u64(n: u64) -> Self {
        n as f64
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: f64 = n.trim().parse().map_err(|_| Error::Parse(s.to_string()))?;
            let d: f64 = d.trim().parse().map_err(|_| Error::Parse(s.to_string()))?;
            return Ok(n / d);
        }
        s.parse().map_err(|_| Error::Parse(s.to_string()))
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn slack() -> Self {
        1e-12
    }

    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }

    fn pretty(&self) -> String {
        format_sig(*self, 6)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_u64(n: u64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn from_f64(x: f64) -> Self {
        // `{}` prints the shortest representation that round-trips.
        parse_decimal(&format!("{x}"))
            .or_else(|_| <Rational as num_traits::FromPrimitive>::from_f64(x).ok_or(Error::Parse(x.to_string())))
            .expect("finite float")
    }

    fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n = parse_decimal(n)?;
            let d = parse_decimal(d)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s}")));
            }
            return Ok(n / d);
        }
        parse_decimal(s)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn slack() -> Self {
        Rational::zero()
    }

    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }

    fn pretty(&self) -> String {
        self.to_string()
    }
}

/// Exact parse of a decimal literal with optional exponent.
fn parse_decimal(s: &str) -> Result<Rational> {
    let err = || Error::Parse(format!("not a decimal number: {s:?}"));
    let s = s.trim();
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = s[pos + 1..].parse().map_err(|_| err())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let all = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| err())?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let mut value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        value = -value;
    }
    Ok(value)
}

/// Formats with `sig` significant digits, trimming trailing zeros.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (sig as i32 - 1 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
