//! Scalar field abstraction shared by the exact (rational) and float code paths.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar used by default everywhere.
pub type Q = BigRational;

/// Absolute tolerance for float-mode comparisons.
pub const FLOAT_TOL: f64 = 1e-10;

/// Arithmetic mode selected at the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

/// An ordered field with conversions to and from exact rationals.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + Zero
    + One
{
    const EXACT: bool;
    const MODE: Mode;

    fn from_ratio(q: &Q) -> Self;
    fn to_ratio(&self) -> Q;
    fn to_f64(&self) -> f64;
    fn from_i64(v: i64) -> Self;

    /// Zero test: exact in rational mode, `|x| <= FLOAT_TOL` in float mode.
    fn is_negligible(&self) -> bool;

    /// Decimal rendering used by the JSON schema (`p/q` for rationals).
    fn to_decimal_string(&self) -> String;
    fn parse_decimal(s: &str) -> Result<Self, ParseScalarError>;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn from_frac(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_negligible()
    }

    /// `2^-k` as a scalar.
    fn pow2_neg(k: u32) -> Self {
        Self::from_ratio(&Q::new(BigInt::one(), BigInt::one() << k as usize))
    }
}

#[derive(Debug, thiserror::Error)]
#[error("cannot parse {input:?} as a scalar")]
pub struct ParseScalarError {
    pub input: String,
}

/// Parses `p`, `p/q`, or a plain decimal like `-0.125` / `1e-3` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Q, ParseScalarError> {
    let err = || ParseScalarError { input: s.to_string() };
    let t = s.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| err())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(Q::new(p, q));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (t, 0),
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
    let n = BigInt::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| err())?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let mut q = if scale >= 0 {
        Q::from_integer(n * num::pow(ten, scale as usize))
    } else {
        Q::new(n, num::pow(ten, (-scale) as usize))
    };
    if neg {
        q = -q;
    }
    Ok(q)
}

pub fn format_rational(q: &Q) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl Scalar for Q {
    const EXACT: bool = true;
    const MODE: Mode = Mode::Exact;

    fn from_ratio(q: &Q) -> Self {
        q.clone()
    }
    fn to_ratio(&self) -> Q {
        self.clone()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            if self.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        })
    }
    fn from_i64(v: i64) -> Self {
        Q::from_integer(BigInt::from(v))
    }
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }
    fn to_decimal_string(&self) -> String {
        format_rational(self)
    }
    fn parse_decimal(s: &str) -> Result<Self, ParseScalarError> {
        parse_rational(s)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const MODE: Mode = Mode::Float;

    fn from_ratio(q: &Q) -> Self {
        Scalar::to_f64(q)
    }
    fn to_ratio(&self) -> Q {
        Q::from_float(*self).unwrap_or_else(Q::zero)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn is_negligible(&self) -> bool {
        f64::abs(*self) <= FLOAT_TOL
    }
    fn to_decimal_string(&self) -> String {
        format!("{self:?}")
    }
    fn parse_decimal(s: &str) -> Result<Self, ParseScalarError> {
        match s.split_once('/') {
            Some(_) => parse_rational(s).map(|q| Scalar::to_f64(&q)),
            None => s.trim().parse().map_err(|_| ParseScalarError { input: s.to_string() }),
        }
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

/// Largest power of two `2^-k` (k >= 0) that does not exceed `x`, for `0 < x`.
///
/// Used to keep construction widths dyadic so rational denominators stay small.
pub fn dyadic_floor<S: Scalar>(x: &S) -> S {
    assert!(*x > S::zero(), "dyadic_floor needs a positive argument");
    let mut k = 0u32;
    let mut p = S::one();
    while p > *x {
        k += 1;
        p = S::pow2_neg(k);
    }
    p
}

pub fn max_of<S: Scalar>(a: S, b: S) -> S {
    if a >= b {
        a
    } else {
        b
    }
}

pub fn min_of<S: Scalar>(a: S, b: S) -> S {
    if a <= b {
        a
    } else {
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("3/8").unwrap(), Q::new(3.into(), 8.into()));
        assert_eq!(parse_rational("0.001").unwrap(), Q::new(1.into(), 1000.into()));
        assert_eq!(parse_rational("-1.5e2").unwrap(), Q::from_integer((-150).into()));
        assert_eq!(parse_rational("2e-2").unwrap(), Q::new(1.into(), 50.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn dyadic_floor_is_a_power_of_two_below() {
        let x = Q::new(3.into(), 1000.into());
        let d = dyadic_floor(&x);
        assert_eq!(d, Q::new(1.into(), 512.into()));
        assert_eq!(dyadic_floor(&1.0f64), 1.0);
        assert_eq!(dyadic_floor(&0.3f64), 0.25);
    }

    #[test]
    fn rational_round_trip_through_strings() {
        let q = Q::new((-7).into(), 12.into());
        assert_eq!(Q::parse_decimal(&q.to_decimal_string()).unwrap(), q);
    }
}
