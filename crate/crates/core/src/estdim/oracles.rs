//! Point clouds of sets with known dimensions.

use crate::error::Result;
use crate::group::{CloudModel, PointCloud};
use crate::psmeasure::EmpiricalMeasure;
use crate::spatial::P3;

/// Midpoints of the `2^depth` middle-thirds Cantor intervals of generation
/// `depth`, at resolution `3^-depth / 2`. Midpoints keep every sample off
/// the triadic grid lines.
pub fn cantor(depth: u32) -> Result<PointCloud> {
    let mut xs = vec![0.0f64];
    let mut len = 1.0;
    for _ in 0..depth {
        len /= 3.0;
        xs = xs.iter().flat_map(|&x| [x, x + 2.0 * len]).collect();
    }
    let points = xs.into_iter().map(|x| [x + len / 2.0, 0.0, 0.0]).collect();
    PointCloud::new(CloudModel::Euclidean, 1, points, len / 2.0)
}

/// The uniform measure on the Cantor set, as equal atoms at the points of
/// [`cantor`]. Balls `B(0, 3^-k)` with `k <= depth` carry mass `2^-k`
/// exactly.
pub fn cantor_measure(depth: u32) -> Result<EmpiricalMeasure> {
    let c = cantor(depth)?;
    let n = c.points.len();
    EmpiricalMeasure::new(CloudModel::Euclidean, 1, c.points, vec![1.0; n], c.resolution)
}

/// `n` equally spaced points on `[a, b]`.
pub fn segment(n: usize, a: f64, b: f64) -> Result<PointCloud> {
    let h = (b - a) / (n - 1) as f64;
    let points = (0..n).map(|i| [a + h * i as f64, 0.0, 0.0]).collect();
    PointCloud::new(CloudModel::Euclidean, 1, points, h / 2.0)
}

/// The lattice `{1..n}^2` rescaled into `[0, 1]^2`.
pub fn lattice(n: usize) -> Result<PointCloud> {
    let h = 1.0 / (n - 1) as f64;
    let mut points: Vec<P3> = vec![];
    for i in 0..n {
        for j in 0..n {
            points.push([i as f64 * h, j as f64 * h, 0.0]);
        }
    }
    PointCloud::new(CloudModel::Euclidean, 2, points, h / 2.0)
}
