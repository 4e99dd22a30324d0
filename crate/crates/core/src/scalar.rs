//! Scalar abstractions.
//!
//! Structural code (Kronecker assembly, generator blocks, cognition matrices)
//! only needs field arithmetic and is written against [`Scalar`], so it runs
//! unchanged over `f32`, `f64` and exact rationals. Anything that needs
//! `exp`, `ln` or square roots is written against [`Real`].

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{Float, FromPrimitive, Num};

/// Field-like scalar usable as a matrix entry.
pub trait Scalar:
    Clone + Debug + PartialEq + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static
{
    /// Exact small rational constant `num / den`.
    fn from_ratio(num: i64, den: i64) -> Self;

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }

    fn is_finite_value(&self) -> bool {
        true
    }
}

impl Scalar for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for f32 {
    fn from_ratio(num: i64, den: i64) -> Self {
        (num as f64 / den as f64) as f32
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

impl Scalar for Rational64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational64::new(num, den)
    }
}

/// Floating point scalar.
pub trait Real: Scalar + Float + FromPrimitive + Display + Sum + Default {
    /// Rescales an absolute tolerance quoted for `f64` to this type's precision.
    fn tol(x: f64) -> Self;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }
}

impl Real for f64 {
    fn tol(x: f64) -> Self {
        x
    }
}

impl Real for f32 {
    fn tol(x: f64) -> Self {
        (x * (f32::EPSILON as f64 / f64::EPSILON)) as f32
    }
}

/// Exact rational from an `f64` (every finite double is a dyadic rational).
pub fn exact_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Rational read from the shortest decimal representation of `x`, so that
/// `0.2` maps to `1/5` rather than its binary expansion.
pub fn decimal_from_f64(x: f64) -> Option<BigRational> {
    use num_bigint::BigInt;
    use num_traits::Pow;
    if !x.is_finite() {
        return None;
    }
    let s = format!("{x:e}");
    let (mantissa, exp) = s.split_once('e')?;
    let exp: i32 = exp.parse().ok()?;
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let shift = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let scale = Pow::pow(&ten, shift.unsigned_abs());
    Some(if shift >= 0 {
        BigRational::from_integer(digits * scale)
    } else {
        BigRational::new(digits, scale)
    })
}
