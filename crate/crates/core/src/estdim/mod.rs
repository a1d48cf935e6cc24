//! Dimension estimators for point clouds and the Poincaré exponent.

mod boxdim;
mod estimate;
mod local;
pub mod oracles;
mod poincare;

pub use boxdim::{box_dimension, grid_count, GRID_OFFSETS};
pub use estimate::{least_squares, DimensionEstimate, ScaleGrid, Witness};
pub use local::{
    assouad_dimension, covering_stats, local_exponent, local_slopes, lower_dimension, Centers, CoveringRecord,
    CoveringStats, LocalParams, DEFAULT_CENTERS, MIN_FIT_POINTS, MIN_RATIO,
};
pub use poincare::{exponent_budget, exponent_from_orbit, poincare_exponent, MIN_WINDOW, PRUNE_SLACK};
