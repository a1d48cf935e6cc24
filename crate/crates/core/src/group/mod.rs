//! Group presentations, orbit enumeration, limit-set samples, cusps and
//! standard horoball families.

pub mod builtin;
mod cloud;
pub mod config;
mod orbit;
mod presentation;

pub use builtin::{builtin, infinite_fuchsian_circles, Params, APOLLONIAN_DELTA, BUILTIN_NAMES};
pub use config::{load_config, parse_config, to_config};
pub use orbit::{enumerate_orbit, matrix_key, Budget, Orbit, OrbitPoint};
pub use presentation::{inverse_letter, Generator, GroupPresentation, KnownProfile, Letter};
mod cusps;
mod horoballs;
mod limit;

pub use cusps::{find_cusps, translation_vector, Cusp, CuspReport, CUSP_TOL, RANK_TOL};
pub use horoballs::{first_overlap, horoball_budget, standard_horoballs, HoroballFamily, MAX_HALVINGS};
pub use cloud::{write_atomic, CloudModel, PointCloud};
pub use limit::{sample_budget, sample_limit_set, sample_shell, INFINITE_WORD_LEN, SAMPLE_SLACK};
