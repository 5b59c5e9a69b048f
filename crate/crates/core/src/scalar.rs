//! The scalar abstraction shared by the geometry and piecewise-linear layers.
//!
//! Hulls, copolygons and piecewise-linear functions only need ordered field
//! operations, so they are written once over [`Scalar`]. The number-theoretic
//! layers fix the scalar to [`crate::Rational`]; `f64` instantiations exist for
//! rendering only.

use std::fmt;

use num_traits::{FromPrimitive, Num, Signed};

/// An ordered field element usable for exact or approximate geometry.
pub trait Scalar: Clone + fmt::Debug + PartialOrd + Num + Signed + FromPrimitive {
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("every scalar type represents small integers")
    }
}

impl<T> Scalar for T where T: Clone + fmt::Debug + PartialOrd + Num + Signed + FromPrimitive {}

/// Slope of the segment from `a` to `b`. Callers guarantee distinct abscissae.
pub(crate) fn slope<T: Scalar>(a: &(T, T), b: &(T, T)) -> T {
    (b.1.clone() - a.1.clone()) / (b.0.clone() - a.0.clone())
}

/// Twice the signed area of the triangle `o, a, b`; positive for a left turn.
pub(crate) fn cross<T: Scalar>(o: &(T, T), a: &(T, T), b: &(T, T)) -> T {
    (a.0.clone() - o.0.clone()) * (b.1.clone() - o.1.clone())
        - (a.1.clone() - o.1.clone()) * (b.0.clone() - o.0.clone())
}
