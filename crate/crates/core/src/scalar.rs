//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All algorithms are written against [`Real`]; `f64` is the production
//! instantiation and `f32` is supported for memory-bound sweeps.

use nalgebra::{DMatrix, DVector, RealField};
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Real floating-point scalar: `f32` or `f64`.
pub trait Real:
    RealField + FftNum + FromPrimitive + ToPrimitive + Copy + serde::Serialize + for<'de> serde::Deserialize<'de>
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// Absolute value without the `Signed`/`ComplexField` method ambiguity.
    #[inline]
    fn magnitude(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }

    /// Machine epsilon of the concrete type.
    fn eps() -> Self {
        <Self as nalgebra::ComplexField>::RealField::default_epsilon()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex scalar over a [`Real`].
pub type C<T> = Complex<T>;
/// Dense complex matrix.
pub type CMat<T> = DMatrix<Complex<T>>;
/// Dense complex column vector.
pub type CVec<T> = DVector<Complex<T>>;

/// `exp(-i * 2π * omega * n)`, the atom used for every synthesized signal.
#[inline]
pub fn atom<T: Real>(omega: T, n: i64) -> C<T> {
    // Reduce omega*|n| modulo 1 in f64 so long grids keep full phase
    // accuracy; negative indices are exact conjugates.
    let phase = (omega.as_f64() * n.unsigned_abs() as f64).rem_euclid(1.0);
    let ang = -2.0 * std::f64::consts::PI * phase;
    let z = C::new(T::lit(ang.cos()), T::lit(ang.sin()));
    if n < 0 {
        z.conj()
    } else {
        z
    }
}

/// Frobenius norm of a complex matrix.
pub fn frobenius<T: Real>(m: &CMat<T>) -> T {
    m.iter()
        .fold(T::zero(), |acc, z| acc + z.norm_sqr())
        .sqrt()
}

/// Euclidean norm of a complex slice.
pub fn norm2<T: Real>(v: &[C<T>]) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}
