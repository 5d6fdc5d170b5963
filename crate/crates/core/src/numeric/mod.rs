//! Scalar-generic numerical kernels: half-line quadrature, bracketed root
//! finding and importance-weight statistics.
//!
//! Everything here is written against [`Scalar`], so the same code runs on
//! `f32` and `f64`. The probability layer above it is `f64` only.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

pub mod quadrature;
pub mod roots;
pub mod stats;

/// Floating point scalar usable by the numerical kernels.
pub trait Scalar: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {
    /// Lossless-enough conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
