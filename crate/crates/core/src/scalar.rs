//! Numeric abstraction shared by every model, table and solver in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar type used for probabilities, weights and revenues.
///
/// Implemented for `f32` and `f64`. The solver tolerances are expressed in
/// `f64` and converted with [`Scalar::lit`], so `f32` is adequate for
/// evaluation and diagnostics but too coarse for the exact-fit routines.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("finite literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Sum of a slice with Neumaier compensation.
pub fn compensated_sum<T: Scalar>(values: impl IntoIterator<Item = T>) -> T {
    let mut sum = T::zero();
    let mut carry = T::zero();
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry = carry + ((sum - t) + v);
        } else {
            carry = carry + ((v - t) + sum);
        }
        sum = t;
    }
    sum + carry
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_decimal_totals() {
        let weights = [0.22_f64, 0.29, 0.21, 0.28];
        assert!((compensated_sum(weights) - 1.0).abs() < 1e-15);
        let w32 = [0.5_f32, 0.25, 0.25];
        assert_eq!(compensated_sum(w32), 1.0);
    }

    #[test]
    fn literal_conversion() {
        assert_eq!(<f32 as Scalar>::lit(0.5), 0.5_f32);
        assert_eq!(<f64 as Scalar>::lit(1e-9).as_f64(), 1e-9);
    }
}
