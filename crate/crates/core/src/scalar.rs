//! Floating-point scalar abstraction shared by the transform and multiplier code.

use num_traits::{Float, FloatConst};
use rustfft::FftNum;

/// A real scalar usable in transforms: `f32` or `f64`.
pub trait Real: FftNum + Float + FloatConst + Default {
    #[inline]
    fn of(v: f64) -> Self {
        <Self as num_traits::NumCast>::from(v).expect("finite conversion")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).expect("finite conversion")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `e(t) = exp(2πi t)`.
#[inline]
pub fn e<T: Real>(t: T) -> num_complex::Complex<T> {
    // Reduce first so large arguments keep their fractional precision.
    let frac = t - t.round();
    let angle = T::TAU() * frac;
    num_complex::Complex::new(angle.cos(), angle.sin())
}
