//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display, LowerExp};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point type the engine computes in: `f32` or `f64`.
///
/// Every numeric routine in the crate is generic over this trait. The exact
/// operator-algebra coefficients live in [`crate::ordering`] as Gaussian
/// integers and are converted into `Real` only when a moment is evaluated.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal; values outside the range saturate to infinity.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).unwrap_or_else(|| {
            if x.is_sign_negative() {
                Self::neg_infinity()
            } else {
                Self::infinity()
            }
        })
    }

    /// Converts an exact integer coefficient.
    fn from_int(x: i128) -> Self {
        Self::from_i128(x).unwrap_or_else(|| Self::lit(x as f64))
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Magnitude beyond which a generated moment counts as diverged.
    fn overflow_limit() -> Self {
        let cap = Self::max_value() / Self::lit(1e6);
        let limit = Self::lit(1e100);
        if limit < cap {
            limit
        } else {
            cap
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over the engine scalar.
pub type Cx<T> = Complex<T>;

pub(crate) fn cx<T: Real>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

pub(crate) fn cx_real<T: Real>(re: T) -> Cx<T> {
    Complex::new(re, T::zero())
}

/// Exact Gaussian-integer coefficient converted to the engine scalar.
pub(crate) fn cx_exact<T: Real>(c: Complex<i128>) -> Cx<T> {
    Complex::new(T::from_int(c.re), T::from_int(c.im))
}

pub(crate) fn usize_to<T: Real>(n: usize) -> T {
    T::from_usize(n).unwrap_or_else(T::infinity)
}
