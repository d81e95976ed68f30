//! Scalar abstraction: every numerical routine in this crate is generic over
//! [`Real`], which `f32` and `f64` both satisfy.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating-point scalar the crate is generic over.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Send + Sync + 'static
{
}

/// Convert an `f64` literal into the generic scalar.
#[inline]
pub(crate) fn cst<F: Real>(x: f64) -> F {
    F::from_f64(x).expect("constant not representable in scalar type")
}
