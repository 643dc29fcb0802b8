//! Floating-point abstraction shared by every numerical routine in the crate.

use ndarray::NdFloat;
use num_traits::{FromPrimitive, ToPrimitive};

/// Floating point: `f32` or `f64`.
pub trait Scalar: NdFloat + FromPrimitive + ToPrimitive + Default {
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
