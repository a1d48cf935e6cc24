//! Limit sets and Patterson-Sullivan measures of Kleinian groups, with
//! estimators for their box, Assouad, lower and regularity dimensions and
//! the closed-form predictions these estimates are checked against.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estdim;
pub mod group;
pub mod hypgeom;
pub mod predict;
pub mod psmeasure;
pub mod scalar;
pub mod spatial;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type MobiusMap = hypgeom::Mobius<f64>;
pub type Point = hypgeom::InteriorPoint<f64>;
pub type Boundary = hypgeom::BoundaryPoint<f64>;
pub type HoroballF64 = hypgeom::Horoball<f64>;
pub type Profile = predict::GroupProfile<f64>;
pub type Report = predict::DimensionReport<f64>;
