//! Scalar abstractions.
//!
//! Everything that only needs field arithmetic (critical wavenumber, linear
//! rates, dispersion determinant) is generic over [`Scalar`], which admits
//! exact rationals as well as floats. Anything that needs square roots
//! (kernel chart, amplitudes, boundaries) is generic over [`Real`].

use core::fmt::Debug;
use core::ops::Neg;

use num_rational::Rational64;
use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// Field-like scalar used by the exact parts of the linear analysis.
pub trait Scalar:
    Copy + Num + Neg<Output = Self> + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
    /// Relative tolerance used when checking algebraic identities.
    ///
    /// Zero for exact arithmetic.
    fn identity_tol() -> Self;

    /// Absolute value.
    fn magnitude(self) -> Self;

    /// `true` when `x` vanishes relative to the magnitude `scale`.
    fn negligible(x: Self, scale: Self) -> bool {
        x.magnitude() <= Self::identity_tol() * (Self::one() + scale.magnitude())
    }

    /// Nearest `f64` (for diagnostics and error payloads).
    fn approx_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact ratio of two small integers.
    fn ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num).expect("integer is representable") / Self::from_i64(den).expect("integer is representable")
    }
}

impl Scalar for f64 {
    fn identity_tol() -> Self {
        1e-10
    }
    fn magnitude(self) -> Self {
        self.abs()
    }
}

impl Scalar for f32 {
    fn identity_tol() -> Self {
        1e-4
    }
    fn magnitude(self) -> Self {
        self.abs()
    }
}

impl Scalar for Rational64 {
    fn identity_tol() -> Self {
        Rational64::from_integer(0)
    }
    fn magnitude(self) -> Self {
        if self < Rational64::from_integer(0) {
            -self
        } else {
            self
        }
    }
}

/// Floating-point scalar: [`Scalar`] plus square roots and friends.
pub trait Real: Scalar + Float {}

impl<T: Scalar + Float> Real for T {}

/// Lossy conversion of an `f64` literal into `T`.
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("literal is representable")
}
