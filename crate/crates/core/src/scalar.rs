//! Real-number abstraction used by the learner and the pipeline.
//!
//! Everything that carries a deviant mean, a candidate adjustment or a raw
//! prediction is generic over [`Scalar`]. The crate root exposes `f64` and
//! `f32` aliases for the common cases.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar accepted by the learner.
pub trait Scalar: Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Lossless for every class value this crate produces (classes are ≤ 10).
    fn from_class(class: u32) -> Self {
        Self::from_u32(class).expect("class values fit every float type")
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable as float")
    }

    /// Used by configuration parsing, which always works in `f64`.
    fn from_f64_lossy(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).unwrap_or_else(Self::nan)
    }
}

impl<T> Scalar for T where T: Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_conversion_is_exact() {
        for c in 1..=10u32 {
            assert_eq!(<f32 as Scalar>::from_class(c), c as f32);
            assert_eq!(<f64 as Scalar>::from_class(c), c as f64);
        }
    }
}
