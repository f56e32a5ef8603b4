//! Scalar abstraction for the closed-form kernels.

use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar: `f32` or `f64`.
///
/// Kernels that are pure math (geometry factors, line searches, filter
/// functions, regression) are generic over this trait so they can run in
/// either precision. The pipelines and parameter records use `f64`.
pub trait Float:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossless embedding of a small constant.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("constant out of range for scalar type")
    }
}

impl Float for f32 {}
impl Float for f64 {}

#[cfg(test)]
mod tests {
    use super::Float;

    fn hypot_generic<T: Float>(a: T, b: T) -> T {
        (a * a + b * b).sqrt()
    }

    #[test]
    fn works_in_both_precisions() {
        assert_eq!(hypot_generic(3.0f64, 4.0f64), 5.0);
        assert_eq!(hypot_generic(3.0f32, 4.0f32), 5.0);
    }
}
