//! Scalar abstraction shared by every numerical module.
//!
//! All of the physics is written against [`Real`], which is implemented for
//! `f32` and `f64`. Tolerances quoted in the docs assume `f64`.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Floating point type usable by the spectral machinery.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + FftNum
    + Default
    + Debug
    + Display
    + LowerExp
    + Sum
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

/// Converts a `T` into `f64` for reporting and file output.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Integer power helper that avoids `powf` for small integral exponents.
#[inline]
pub(crate) fn pow_real<T: Real>(x: T, e: T) -> T {
    let r = e.round();
    if (e - r).abs() <= T::epsilon() * lit(8.0) && r.abs() <= lit(16.0) {
        x.powi(r.to_i32().unwrap_or(0))
    } else {
        x.powf(e)
    }
}
