//! Scalar abstraction for the kernel layer.
//!
//! Densities, CDFs, quantiles and conjugate updates are written against
//! [`Real`] so they work for `f32` and `f64` alike; iteration tolerances
//! scale with the type's epsilon. The crate root exports `f64` aliases,
//! which is what the solver and Monte Carlo layers use.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

pub trait Real:
    Float + NumAssign + FromPrimitive + ToPrimitive + Sum<Self> + Debug + Display + Copy + 'static
{
}

impl<T> Real for T where
    T: Float
        + NumAssign
        + FromPrimitive
        + ToPrimitive
        + Sum<Self>
        + Debug
        + Display
        + Copy
        + 'static
{
}

/// Converts an `f64` constant into `T`. Panics only if `T` cannot
/// represent ordinary finite doubles, which no supported scalar does.
#[inline]
pub fn cast<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("scalar type must represent f64 constants")
}
