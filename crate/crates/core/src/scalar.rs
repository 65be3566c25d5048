//! Coefficient fields: exact rationals for the model backends, `f64` for DEC.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// A field of coefficients usable by the Hodge engine.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when arithmetic is exact and "zero" means exactly zero.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;

    fn from_frac(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    fn to_f64(&self) -> f64;

    /// Magnitude used to choose elimination pivots.
    fn pivot_weight(&self) -> f64 {
        self.to_f64().abs()
    }

    /// Text form used by the form file format.
    fn render(&self) -> String;

    fn parse_text(text: &str) -> Result<Self, String>;
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_frac(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn pivot_weight(&self) -> f64 {
        // any nonzero pivot is exact; prefer small denominators loosely
        if self.is_zero() {
            0.0
        } else {
            1.0 / (1.0 + self.denom().bits() as f64 + self.numer().abs().bits() as f64)
        }
    }

    fn render(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn parse_text(text: &str) -> Result<Self, String> {
        let text = text.trim();
        let (num, den) = match text.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (text, "1"),
        };
        let num: BigInt = num
            .parse()
            .map_err(|_| format!("invalid numerator `{num}`"))?;
        let den: BigInt = den
            .parse()
            .map_err(|_| format!("invalid denominator `{den}`"))?;
        if den.is_zero() {
            return Err(format!("zero denominator in `{text}`"));
        }
        Ok(BigRational::new(num, den))
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn render(&self) -> String {
        // `{:?}` is the shortest representation that round-trips
        format!("{self:?}")
    }

    fn parse_text(text: &str) -> Result<Self, String> {
        let text = text.trim();
        let v: f64 = text
            .parse()
            .map_err(|_| format!("invalid decimal `{text}`"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("non-finite value `{text}`"))
        }
    }
}

/// Shorthand for an exact rational `num/den`.
pub fn q(num: i64, den: i64) -> Rational {
    Rational::from_frac(num, den)
}
