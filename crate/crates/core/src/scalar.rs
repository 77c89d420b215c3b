//! Scalar abstractions shared by the numeric and exact code paths.
//!
//! [`Field`] is what the Grassmann kernel and the Laurent series need from a
//! coefficient: ring operations plus division by units. It covers `f32`,
//! `f64`, `Complex<f32>`, `Complex<f64>` and `BigRational`.
//!
//! [`Real`] is the floating-point type the geometric and closed-form
//! evaluators are generic over: `f32`, `f64` or the double-double
//! `TwoFloat`.
//!
//! [`Arith`] is the minimal arithmetic the printed closed-form polynomials
//! need. It is implemented for every [`Real`] and for Laurent series, so the
//! same formula yields both a number and an exact expansion.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{Float, FloatConst, FromPrimitive, Num};
use twofloat::TwoFloat;

/// Coefficient field for Grassmann elements and power series.
pub trait Field: Num + Clone + Neg<Output = Self> + Debug + Send + Sync + 'static {
    fn from_int(n: i64) -> Self;
}

impl<T> Field for T
where
    T: Num + Clone + Neg<Output = T> + Debug + Send + Sync + FromPrimitive + 'static,
{
    fn from_int(n: i64) -> Self {
        T::from_i64(n).expect("integer not representable in coefficient field")
    }
}

/// `1/x` refined by one Newton step `y + y(1 − xy)`.
///
/// Exact fields are unaffected; for double-double types this recovers the
/// low word that a plain quotient can drop.
pub fn recip<C: Field>(x: &C) -> C {
    let y = C::one() / x.clone();
    let residual = C::one() - x.clone() * y.clone();
    y.clone() + y * residual
}

/// Real floating-point scalar (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Roughly twice the precision of `Self`, for long cancelling sums.
    type Wide: Real;

    fn widen(self) -> Self::Wide;

    fn narrow(wide: Self::Wide) -> Self;

    /// Converts an `f64` literal; exact for `f64`, rounded for `f32`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {
    type Wide = f64;

    fn widen(self) -> f64 {
        f64::from(self)
    }

    fn narrow(wide: f64) -> f32 {
        wide as f32
    }
}

impl Real for f64 {
    type Wide = TwoFloat;

    fn widen(self) -> TwoFloat {
        TwoFloat::from(self)
    }

    fn narrow(wide: TwoFloat) -> f64 {
        f64::from(wide)
    }
}

impl Real for TwoFloat {
    type Wide = TwoFloat;

    fn widen(self) -> TwoFloat {
        self
    }

    fn narrow(wide: TwoFloat) -> TwoFloat {
        wide
    }
}

/// Arithmetic needed to evaluate a polynomial-over-polynomial formula.
pub trait Arith:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self>
{
    fn from_int(n: i64) -> Self;

    fn powi(&self, e: u32) -> Self {
        let mut acc = Self::from_int(1);
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }
}

impl<T: Real> Arith for T {
    fn from_int(n: i64) -> Self {
        T::from_i64(n).expect("integer fits in float")
    }

    fn powi(&self, e: u32) -> Self {
        Float::powi(*self, e as i32)
    }
}
