//! Scalar abstractions: exact rationals for the algebra, a float trait for
//! the numerics.

use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Exact coefficient type used throughout the polynomial layer.
pub type Rat = BigRational;

/// Floating scalar the numerical layer is generic over (f32 or f64).
pub trait Real:
    Float + FromPrimitive + ToPrimitive + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + std::fmt::Debug
        + std::fmt::Display
        + Send
        + Sync
        + 'static
{
}

/// Shorthand conversion from `f64` literals into a generic scalar.
#[inline]
pub fn r<R: Real>(x: f64) -> R {
    R::from_f64(x).expect("f64 converts into every Real")
}

/// Converts an exact rational to the generic scalar through `f64`.
#[inline]
pub fn rat_to_real<R: Real>(q: &Rat) -> R {
    r(q.to_f64().unwrap_or(f64::NAN))
}
