//! Scalar abstractions.
//!
//! Everything that integrates, sums or fits real numbers is written against
//! [`Real`], so the same code runs in `f32` for quick sweeps and `f64` for the
//! acceptance tolerances. Exact local factors go through [`ExactField`], which
//! also admits `Ratio<i128>`.

use std::fmt::Debug;
use std::iter::Sum;

use num_rational::Ratio;
use num_traits::{Float, FloatConst, FromPrimitive, Num, Pow, ToPrimitive};

/// Floating point scalar used by quadrature, measures and fits.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Default + Send + Sync + 'static
{
    /// Lossy conversion from `f64` constants.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn from_u(n: u64) -> Self {
        Self::from_u64(n).expect("integer fits the scalar")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// A field in which local Euler factors at integer exponents can be evaluated
/// exactly (rationals) or approximately (floats).
pub trait ExactField: Num + Clone + Debug + FromPrimitive + Pow<i32, Output = Self> {}

impl ExactField for f32 {}
impl ExactField for f64 {}
impl ExactField for Ratio<i128> {}
impl ExactField for Ratio<i64> {}

/// Neumaier's variant of Kahan summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    carry: T,
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self { sum: T::zero(), carry: T::zero() }
    }

    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry = self.carry + ((self.sum - t) + x);
        } else {
            self.carry = self.carry + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.carry
    }
}

impl<T: Real> FromIterator<T> for CompensatedSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of a slice, in slice order.
pub fn compensated_sum<T: Real>(xs: &[T]) -> T {
    xs.iter().copied().collect::<CompensatedSum<T>>().value()
}
