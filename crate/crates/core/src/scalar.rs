//! Scalar abstraction for the numerical kernels.
//!
//! Everything downstream is generic over [`Real`], so the same code runs in
//! `f32` or `f64`. The test suites and the CLI pin `f64`.

use num_complex::Complex;

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + num_traits::NumAssign
    + std::fmt::Debug
    + std::fmt::Display
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from a literal; panics only if the target type cannot
    /// represent any approximation of `x` (never for f32/f64 finite inputs).
    fn of(x: f64) -> Self {
        num_traits::FromPrimitive::from_f64(x).expect("literal not representable")
    }

    fn of_usize(n: usize) -> Self {
        num_traits::FromPrimitive::from_usize(n).expect("usize not representable")
    }

    fn to_f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).expect("scalar not convertible to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand for a complex number over the generic scalar.
pub type C<T> = Complex<T>;

/// Complex constructor from literals.
pub fn c<T: Real>(re: f64, im: f64) -> C<T> {
    Complex::new(T::of(re), T::of(im))
}

/// Real scalar promoted to a complex number.
pub fn cr<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}
