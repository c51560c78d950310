//! Scalar abstraction shared by the numerical kernels.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point type the operator algebra, integrators and oracles are
/// generic over. Implemented for `f32` and `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + NumAssign
    + Default
    + Send
    + Sync
    + Sum
    + 'static
{
    /// Converts an `f64` literal or physical parameter into `Self`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 value representable in scalar type")
    }

    /// Lossless (for `f64`) view as `f64`, used for reporting.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }

    /// Machine epsilon of the type.
    fn eps() -> Self {
        Self::epsilon()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a [`Real`] scalar.
pub type C<T> = Complex<T>;

#[inline]
pub fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

/// Complex number from `f64` parts.
#[inline]
pub fn cl<T: Real>(re: f64, im: f64) -> C<T> {
    Complex::new(T::lit(re), T::lit(im))
}

/// Converts a `Complex<f64>` physical parameter into the working scalar.
#[inline]
pub fn from_c64<T: Real>(z: Complex<f64>) -> C<T> {
    Complex::new(T::lit(z.re), T::lit(z.im))
}

/// Largest entry modulus of a complex slice.
pub fn max_abs<T: Real>(xs: &[C<T>]) -> T {
    xs.iter().fold(T::zero(), |m, z| m.max(z.norm()))
}

/// Euclidean norm of a complex slice.
pub fn norm2<T: Real>(xs: &[C<T>]) -> T {
    xs.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}
