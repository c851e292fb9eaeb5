//! Floating point abstraction shared by the whole crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar type the engine is generic over (`f32` or `f64`).
///
/// Besides the usual float operations, each type carries the tolerances the
/// geometric predicates use, since a single absolute epsilon cannot serve
/// both precisions.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Slack allowed on barycentric coordinates before a point is considered
    /// outside its face.
    fn bary_eps() -> Self;
    /// Relative tolerance for orientation tests and parameter snapping.
    fn geom_eps() -> Self;

    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("scalar conversion")
    }

    #[inline]
    fn of_usize(v: usize) -> Self {
        Self::from_usize(v).expect("scalar conversion")
    }

    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn half() -> Self {
        Self::of(0.5)
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn clamp01(self) -> Self {
        self.max(Self::zero()).min(Self::one())
    }
}

impl Scalar for f64 {
    #[inline]
    fn bary_eps() -> Self {
        1e-9
    }
    #[inline]
    fn geom_eps() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    #[inline]
    fn bary_eps() -> Self {
        1e-4
    }
    #[inline]
    fn geom_eps() -> Self {
        1e-6
    }
}
