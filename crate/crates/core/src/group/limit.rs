use std::collections::HashSet;

use super::cloud::{CloudModel, PointCloud};
use super::orbit::{enumerate_orbit, Budget};
use super::presentation::GroupPresentation;
use crate::error::{Error, Result};

/// Slack added to the largest generator displacement to absorb pruning.
pub const SAMPLE_SLACK: f64 = 1.0;

/// Thickness of the shell of orbit points used as a sample. Every reduced
/// word crosses a sphere of radius `t` about the base point at an element
/// within one generator displacement of it, so a shell this thick below the
/// enumeration limit shadows the whole limit set.
pub fn sample_shell(g: &GroupPresentation) -> f64 {
    g.generators().iter().map(|x| x.map.origin_distance()).fold(0.0, f64::max) + SAMPLE_SLACK
}

/// Word length used for geometrically infinite groups.
pub const INFINITE_WORD_LEN: usize = 2;

/// Enumeration budget for sampling `g` at `resolution`.
///
/// Groups marked geometrically infinite may have generators of unbounded
/// displacement, so a distance shell misses most of the limit set; they
/// are sampled over all words of length at most [`INFINITE_WORD_LEN`]
/// instead and the declared resolution is only nominal.
pub fn sample_budget(g: &GroupPresentation, resolution: f64) -> Budget {
    if g.is_geometrically_infinite() {
        return Budget::new(INFINITE_WORD_LEN, f64::INFINITY, 2_000_000);
    }
    Budget::new(usize::MAX, (1.0 / resolution).ln().max(0.0) + sample_shell(g), 2_000_000)
}

/// Samples the limit set by radially projecting orbit points at distance at
/// least `ln(1 / target_resolution)` to the boundary sphere.
///
/// Points are thinned to one per cell of side `resolution / 2`. When the
/// budget does not reach that depth the sample is taken from the
/// deepest reliable shell and the declared resolution is the coarser one
/// actually achieved.
pub fn sample_limit_set(g: &GroupPresentation, target_resolution: f64, budget: Budget) -> Result<PointCloud> {
    if !(target_resolution > 0.0) || !target_resolution.is_finite() {
        return Err(Error::InvalidParameter(format!("target resolution must be positive, got {target_resolution}")));
    }
    let orbit = enumerate_orbit(g, budget)?;
    let t_target = (1.0 / target_resolution).ln().max(0.0);
    let t = t_target.min(orbit.complete_dist - sample_shell(g));
    let resolution = if t >= t_target { target_resolution } else { (-t.max(0.0)).exp() };
    // one point per cell of side resolution / 2 is enough to keep the cover
    let side = resolution / 2.0;
    let mut cells = HashSet::new();
    let points: Vec<_> = orbit
        .points
        .iter()
        .filter(|p| p.dist > 0.0 && p.dist >= t)
        .map(|p| p.projection())
        .filter(|v| cells.insert(v.map(|x| (x / side).floor() as i64)))
        .collect();
    if points.is_empty() {
        return Err(Error::EmptySample);
    }
    let provenance = format!(
        "orbit of {} points, max_word_len={}, max_dist={}, complete to {:.3}{}{}",
        orbit.len(),
        budget.max_word_len,
        budget.max_dist,
        orbit.complete_dist,
        if orbit.truncated_by_points { ", truncated by point cap" } else { "" },
        if orbit.truncated_by_words { ", truncated by word length" } else { "" },
    );
    Ok(PointCloud::new(CloudModel::Ball, g.dim(), points, resolution)?.with_provenance(provenance))
}
