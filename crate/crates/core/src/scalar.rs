//! Scalar abstraction: the numeric code in this crate is generic over the
//! floating-point type and is instantiated as `f32` or `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar for state vectors, model parameters and statistics.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum<Self>
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// How far a state-vector norm may drift from 1 before it is rejected.
    fn unit_norm_tolerance() -> Self;
}

impl Real for f32 {
    fn unit_norm_tolerance() -> Self {
        1e-4
    }
}

impl Real for f64 {
    fn unit_norm_tolerance() -> Self {
        1e-9
    }
}

/// Lift an `f64` literal into the generic scalar.
#[inline]
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}
