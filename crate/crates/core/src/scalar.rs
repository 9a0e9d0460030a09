//! Scalar abstraction shared by every numeric routine in the crate.

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display, LowerExp};

/// Floating point type the lab computes in.
///
/// Implemented for `f32` and `f64`. Every tolerance quoted in the
/// documentation assumes `f64`; `f32` builds work but will not reach them.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal, panicking only for values the type cannot represent at all.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("usize representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Largest `z` for which `exp(-z)` is still a normal number.
    fn underflow_exponent() -> Self {
        -Self::min_positive_value().ln()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Returns `Some(k)` when `n` is an integer representable as `i32`.
pub fn integer_power<T: Real>(n: T) -> Option<i32> {
    if n.fract() == T::zero() && n.abs() <= T::lit(i32::MAX as f64) {
        n.to_i32()
    } else {
        None
    }
}

/// `u^n` over the reals.
///
/// Integer powers use repeated multiplication and accept negative `u`; a
/// fractional power of a negative base has no real value and yields `None`.
pub fn real_pow<T: Real>(u: T, n: T) -> Option<T> {
    match integer_power(n) {
        Some(k) => Some(u.powi(k)),
        None if u < T::zero() => None,
        None => Some(u.powf(n)),
    }
}
