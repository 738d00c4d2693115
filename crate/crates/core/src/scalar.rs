//! Scalar abstraction for the numeric core.
//!
//! All value-level math (embedding rows, metric values, slice statistics, GP
//! posteriors) is generic over [`Real`]; `f32` and `f64` are the two
//! instantiations. Canonical circulant entries are generated once in single
//! precision and widened into the caller's scalar, so the choice of `T`
//! affects arithmetic precision but never which random values are drawn.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::AddAssign;

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar usable throughout the crate: `f32` or `f64`.
///
/// `nalgebra::RealField` is included so the GP module can factorize matrices
/// of the same scalar. Where `Float` and `RealField` both provide a method
/// (`sqrt`, `exp`, ...) call sites disambiguate explicitly.
pub trait Real:
    Float
    + FromPrimitive
    + AddAssign
    + Sum
    + Display
    + Debug
    + Send
    + Sync
    + nalgebra::RealField
    + 'static
{
    /// Widen a canonical single-precision entry into this scalar.
    fn from_entry(v: f32) -> Self;
}

impl Real for f32 {
    #[inline]
    fn from_entry(v: f32) -> Self {
        v
    }
}

impl Real for f64 {
    #[inline]
    fn from_entry(v: f32) -> Self {
        v as f64
    }
}
