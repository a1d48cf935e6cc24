//! Scalar abstraction shared by the geometry kernel.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point type usable by the hyperbolic geometry kernel (`f32` or `f64`).
///
/// The associated tolerances are the precision-dependent thresholds used for
/// determinant renormalization and trace classification.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Largest accepted |det - 1| after renormalization.
    const DET_TOL: Self;
    /// |tr^2 - 4| at or below this is parabolic.
    const PARABOLIC_TOL: Self;
    /// |tr^2 - 4| in (PARABOLIC_TOL, AMBIGUOUS_TOL] cannot be classified.
    const AMBIGUOUS_TOL: Self;
    /// Tolerance on unit norm of sphere points.
    const UNIT_TOL: Self;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }
}

impl Scalar for f64 {
    const DET_TOL: Self = 1e-10;
    const PARABOLIC_TOL: Self = 1e-8;
    const AMBIGUOUS_TOL: Self = 1e-7;
    const UNIT_TOL: Self = 1e-12;
}

impl Scalar for f32 {
    const DET_TOL: Self = 1e-4;
    const PARABOLIC_TOL: Self = 1e-3;
    const AMBIGUOUS_TOL: Self = 1e-2;
    const UNIT_TOL: Self = 1e-5;
}
