//! Scalar abstraction shared by every numeric kernel.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, Signed};

/// Real floating-point scalar the kernels are generic over (`f32`, `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + Signed + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Euler–Mascheroni constant.
    fn euler_gamma() -> Self;
}

impl Real for f64 {
    fn euler_gamma() -> Self {
        0.577_215_664_901_532_9
    }
}

impl Real for f32 {
    fn euler_gamma() -> Self {
        0.577_215_7
    }
}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Converts a count into the working scalar.
#[inline]
pub fn from_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}

/// Tolerance floor: `requested`, but never below a few ulps of the scalar type.
#[inline]
pub fn tol<T: Real>(requested: f64) -> T {
    lit::<T>(requested).max(T::epsilon() * lit(8.0))
}
