//! Hyperbolic geometry in dimension d + 1 for d in {1, 2}.
//!
//! Maps act on the upper half-space; the Poincare ball is reached through
//! an inversion that sends the half-space point (0, 1) to the origin.

mod geodesic;
mod horoball;
mod mobius;
mod point;

pub use geodesic::{geodesic_point, geodesic_point_from_origin, straightening_map};
pub use horoball::{escape_depth, shadow, squeeze, Horoball, Shadow};
pub use mobius::{classify, Classification, IsometryClass, Mobius};
pub use point::{hyp_distance, BoundaryPoint, InteriorPoint, Model};

/// Image of a point under a map.
pub trait Apply<T> {
    fn apply_by(&self, g: &Mobius<T>) -> crate::Result<Self>
    where
        Self: Sized;
}

impl<T: crate::Scalar> Apply<T> for InteriorPoint<T> {
    fn apply_by(&self, g: &Mobius<T>) -> crate::Result<Self> {
        g.apply_interior(self)
    }
}

impl<T: crate::Scalar> Apply<T> for BoundaryPoint<T> {
    fn apply_by(&self, g: &Mobius<T>) -> crate::Result<Self> {
        g.apply_boundary(self)
    }
}

/// Applies `g` to an interior or boundary point.
pub fn apply<T: crate::Scalar, P: Apply<T>>(g: &Mobius<T>, x: &P) -> crate::Result<P> {
    x.apply_by(g)
}
