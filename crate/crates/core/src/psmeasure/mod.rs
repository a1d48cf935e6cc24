//! Patterson-Sullivan measures, the global measure formula and
//! regularity estimates.

mod chart;
mod gmf;
mod lemmas;
mod measure;
mod patterson;
mod regularity;

pub use chart::{CuspChart, DEFAULT_UNFOLD_TERMS};
pub use measure::{ball_mass, EmpiricalMeasure};
pub use patterson::{
    convergence_diagnostic, patterson_measure, ConvergenceReport, ConvergenceRow, patterson_measure_with, MeasureParams, DEFAULT_EPSILON,
};
pub use gmf::{gmf, gmf_report, horoball_sum, k_and_rho, DeltaSource, GMFContext, GmfReport, GmfRow};
pub use regularity::{
    local_dimension, lower_regularity, regularity, upper_regularity, Direction, LocalDimension, RegularityEstimate, RegularityParams,
    RegularityWitness, MIN_ATOMS,
};
pub use lemmas::{counting_ratio, ray_depth, squeeze_mass_check, ureg_witness, SqueezeReport, SqueezeRow, UregWitness};
