use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::estimate::{least_squares, DimensionEstimate, ScaleGrid};
use crate::error::{Error, Result};
use crate::group::PointCloud;
use crate::spatial::P3;

/// Number of random grid offsets over which cell counts are minimized.
pub const GRID_OFFSETS: usize = 3;

/// Grid offsets for cells of side `r`; the first is always zero.
pub(crate) fn offsets(seed: u64, cols: usize) -> Vec<P3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..GRID_OFFSETS)
        .map(|i| {
            let mut o = [0.0; 3];
            if i > 0 {
                for x in o.iter_mut().take(cols) {
                    *x = rng.gen::<f64>();
                }
            }
            o
        })
        .collect()
}

pub(crate) fn cell(p: &P3, r: f64, off: &P3) -> [i64; 3] {
    [((p[0] / r) + off[0]).floor() as i64, ((p[1] / r) + off[1]).floor() as i64, ((p[2] / r) + off[2]).floor() as i64]
}

/// Occupied cells of side `r`, minimized over offsets (given as fractions of
/// a cell).
pub fn grid_count(points: &[P3], r: f64, offs: &[P3]) -> usize {
    offs.iter()
        .map(|o| {
            let mut keys: Vec<[i64; 3]> = points.iter().map(|p| cell(p, r, o)).collect();
            keys.sort_unstable();
            keys.dedup();
            keys.len()
        })
        .min()
        .unwrap_or(0)
}

pub(crate) fn check_scale(cloud: &PointCloud, r: f64) -> Result<()> {
    if r < 2.0 * cloud.resolution * (1.0 - 1e-12) {
        return Err(Error::Precondition(format!(
            "scale {r:e} is below 2 x resolution = {:e}",
            2.0 * cloud.resolution
        )));
    }
    Ok(())
}

/// Box-counting dimension: least-squares slope of `ln N_r` against
/// `ln(1/r)` over the grid.
pub fn box_dimension(cloud: &PointCloud, grid: &ScaleGrid, seed: u64) -> Result<DimensionEstimate> {
    if cloud.is_empty() {
        return Err(Error::EmptySample);
    }
    let scales = grid.scales();
    if scales.len() < 4 {
        return Err(Error::InsufficientData(format!("box dimension needs at least 4 scales, got {}", scales.len())));
    }
    check_scale(cloud, scales[0])?;
    let offs = offsets(seed, cloud.columns());
    let xs: Vec<f64> = scales.iter().map(|r| -r.ln()).collect();
    let ys: Vec<f64> = scales.iter().map(|&r| (grid_count(&cloud.points, r, &offs) as f64).ln()).collect();
    let (slope, _, rms) = least_squares(&xs, &ys);
    Ok(DimensionEstimate {
        value: slope.clamp(0.0, cloud.dim as f64),
        method: "box-counting".into(),
        scale_range: (grid.r_min, grid.r_max),
        witness: None,
        diagnostics: vec![("raw_slope".into(), slope), ("residual".into(), rms)],
    })
}
