//! Floating-point sample trait: the one bound every numeric routine uses.

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar the rasters and solvers are generic over.
///
/// Implemented for `f32` and `f64`. The two conversion methods exist because
/// `FromPrimitive`/`ToPrimitive` return `Option` and constants, RNG samples
/// and metric accumulation always go through `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + rustfft::FftNum + Send + Sync + 'static
{
    /// Conversion from `f64`, rounding to the nearest representable value.
    fn from_f64_c(v: f64) -> Self;
    /// Widening (for `f32`: exact) conversion to `f64`.
    fn as_f64(self) -> f64;
}

impl Scalar for f32 {
    #[inline]
    fn from_f64_c(v: f64) -> Self {
        v as f32
    }
    #[inline]
    fn as_f64(self) -> f64 {
        f64::from(self)
    }
}

impl Scalar for f64 {
    #[inline]
    fn from_f64_c(v: f64) -> Self {
        v
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}
