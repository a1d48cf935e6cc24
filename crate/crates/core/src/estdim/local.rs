use rayon::prelude::*;

use super::boxdim::{cell, check_scale, offsets};
use super::estimate::{least_squares, DimensionEstimate, Witness};
use crate::error::{Error, Result};
use crate::group::PointCloud;
use crate::spatial::{farthest_point_sample, KdTree, P3};

/// Default number of farthest-point centers.
pub const DEFAULT_CENTERS: usize = 512;
/// Smallest admissible ratio `R / r`.
pub const MIN_RATIO: f64 = 8.0;
/// Fewest ratios a local slope is fitted over.
pub const MIN_FIT_POINTS: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub enum Centers {
    /// Farthest-point sample of this many cloud points.
    Farthest(usize),
    /// Explicit cloud indices.
    Indices(Vec<usize>),
}

/// Scale window and centers for the local covering estimators.
///
/// Radii form the ladder `r_min * base^k` up to `r_max`. For every center
/// and every radius `R` on the ladder, `N_r(B(x, R))` is counted for ladder
/// scales `r` with `8 <= R / r <= max_ratio`, and the local exponent is the
/// least-squares slope of `ln N_r` against `ln(R / r)` over at least
/// `min_fit` ratios.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalParams {
    /// Defaults to twice the cloud resolution.
    pub r_min: Option<f64>,
    /// Defaults to a quarter of the cloud's bounding-box diameter, widened
    /// to the narrowest admissible window if needed.
    pub r_max: Option<f64>,
    pub max_ratio: f64,
    /// Fewest ratios a local slope is fitted over.
    pub min_fit: usize,
    /// Ratio between consecutive ladder scales.
    pub base: f64,
    pub centers: Centers,
    pub seed: u64,
}

impl Default for LocalParams {
    fn default() -> Self {
        Self::assouad()
    }
}

impl LocalParams {
    /// Long windows (ratios 8 to 256, at least 4 of them): the upper local
    /// exponent settles only over wide ranges of scales.
    pub fn assouad() -> Self {
        Self {
            r_min: None,
            r_max: None,
            max_ratio: 256.0,
            min_fit: MIN_FIT_POINTS,
            base: 2.0,
            centers: Centers::Farthest(DEFAULT_CENTERS),
            seed: 0,
        }
    }

    /// Short windows (ratios 8 to 128, at least 3): near a parabolic point
    /// the thin regime appears at small radii only.
    pub fn lower() -> Self {
        Self { max_ratio: 128.0, min_fit: 3, ..Self::assouad() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoveringRecord {
    pub center: usize,
    pub big: f64,
    pub small: f64,
    pub count: usize,
}

/// Local covering counts, grouped by (center, R) with r decreasing.
#[derive(Clone, Debug)]
pub struct CoveringStats {
    pub records: Vec<CoveringRecord>,
    /// Grid offsets as fractions of a cell.
    pub offsets: Vec<P3>,
    pub scale_range: (f64, f64),
}

struct Ladder {
    scales: Vec<f64>,
    /// Per ladder scale and offset, the cell id of every point.
    cell_ids: Vec<Vec<Vec<u32>>>,
    cell_counts: Vec<Vec<usize>>,
}

fn ladder(cloud: &PointCloud, r_min: f64, r_max: f64, base: f64, offs: &[P3]) -> Ladder {
    let mut scales = vec![r_min];
    while scales.last().unwrap() * base <= r_max * (1.0 + 1e-12) {
        scales.push(scales.last().unwrap() * base);
    }
    let mut cell_ids = vec![];
    let mut cell_counts = vec![];
    for &r in &scales {
        let mut per_off = vec![];
        let mut counts = vec![];
        for o in offs {
            let keys: Vec<[i64; 3]> = cloud.points.iter().map(|p| cell(p, r, o)).collect();
            let mut order: Vec<u32> = (0..keys.len() as u32).collect();
            order.sort_unstable_by_key(|&i| keys[i as usize]);
            let mut ids = vec![0u32; keys.len()];
            let mut next = 0u32;
            for (k, &i) in order.iter().enumerate() {
                if k > 0 && keys[i as usize] != keys[order[k - 1] as usize] {
                    next += 1;
                }
                ids[i as usize] = next;
            }
            counts.push(if keys.is_empty() { 0 } else { next as usize + 1 });
            per_off.push(ids);
        }
        cell_ids.push(per_off);
        cell_counts.push(counts);
    }
    Ladder { scales, cell_ids, cell_counts }
}

fn resolve_centers(cloud: &PointCloud, c: &Centers) -> Result<Vec<usize>> {
    let idx = match c {
        Centers::Farthest(k) => {
            let mut v = farthest_point_sample(&cloud.points, *k);
            v.sort_unstable();
            v
        }
        Centers::Indices(v) => {
            if let Some(&i) = v.iter().find(|&&i| i >= cloud.len()) {
                return Err(Error::InvalidParameter(format!("center index {i} out of range")));
            }
            v.clone()
        }
    };
    if idx.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(idx)
}

/// Counts `N_r(B(x, R) ∩ cloud)` over the scale window for each center.
pub fn covering_stats(cloud: &PointCloud, params: &LocalParams) -> Result<CoveringStats> {
    let centers = resolve_centers(cloud, &params.centers)?;
    let r_min = params.r_min.unwrap_or(2.0 * cloud.resolution);
    check_scale(cloud, r_min)?;
    if !(params.base > 1.0) {
        return Err(Error::InvalidParameter("ladder base must exceed 1".into()));
    }
    if params.min_fit < 2 {
        return Err(Error::InvalidParameter("local slopes need at least 2 ratios".into()));
    }
    let min_steps = (MIN_RATIO.ln() / params.base.ln() - 1e-9).ceil() as usize;
    let max_steps = (params.max_ratio.ln() / params.base.ln() + 1e-9).floor() as usize;
    let widest = params.base.powi((min_steps + params.min_fit - 1) as i32);
    // a cloud too small for the default window (one point, say) gets the
    // narrowest admissible one
    let r_max = params.r_max.unwrap_or((cloud.diameter_bound() / 4.0).max(widest * r_min));
    if r_max < widest * r_min * (1.0 - 1e-12) {
        return Err(Error::Precondition(format!(
            "scale window [{r_min:e}, {r_max:e}] is narrower than the ratio {widest} needed for a local slope"
        )));
    }
    if params.max_ratio < widest {
        return Err(Error::InvalidParameter(format!("max_ratio must be at least {widest}")));
    }
    let offs = offsets(params.seed, cloud.columns());
    let lad = ladder(cloud, r_min, r_max, params.base, &offs);
    let tree = KdTree::new(&cloud.points, cloud.columns());
    let n_ladder = lad.scales.len();
    let max_cells = lad.cell_counts.iter().flatten().copied().max().unwrap_or(0);

    let per_center: Vec<Vec<CoveringRecord>> = centers
        .par_iter()
        .map_init(
            || (vec![0u32; max_cells], 0u32, Vec::new()),
            |(stamp, gen, subset): &mut (Vec<u32>, u32, Vec<usize>), &c| {
                let x = cloud.points[c];
                let mut out = vec![];
                for i in min_steps..n_ladder {
                    let big = lad.scales[i];
                    subset.clear();
                    tree.within(&x, big, |j| subset.push(j));
                    for steps in min_steps..=max_steps.min(i) {
                        let j = i - steps;
                        let mut best = usize::MAX;
                        for ids in &lad.cell_ids[j] {
                            *gen = gen.wrapping_add(1);
                            if *gen == 0 {
                                stamp.iter_mut().for_each(|s| *s = 0);
                                *gen = 1;
                            }
                            let mut n = 0;
                            for &p in subset.iter() {
                                let id = ids[p] as usize;
                                if stamp[id] != *gen {
                                    stamp[id] = *gen;
                                    n += 1;
                                }
                            }
                            best = best.min(n);
                        }
                        out.push(CoveringRecord { center: c, big, small: lad.scales[j], count: best });
                    }
                }
                out
            },
        )
        .collect();
    Ok(CoveringStats { records: per_center.into_iter().flatten().collect(), offsets: offs, scale_range: (r_min, r_max) })
}

/// Local exponent for every (center, R) with at least `min_fit` ratios:
/// (center, R, smallest r, slope).
pub fn local_slopes(stats: &CoveringStats, min_fit: usize) -> Vec<(usize, f64, f64, f64)> {
    let mut out = vec![];
    let recs = &stats.records;
    let mut a = 0;
    while a < recs.len() {
        let mut b = a + 1;
        while b < recs.len() && recs[b].center == recs[a].center && recs[b].big == recs[a].big {
            b += 1;
        }
        if b - a >= min_fit {
            let xs: Vec<f64> = recs[a..b].iter().map(|r| (r.big / r.small).ln()).collect();
            let ys: Vec<f64> = recs[a..b].iter().map(|r| (r.count.max(1) as f64).ln()).collect();
            let (slope, _, _) = least_squares(&xs, &ys);
            out.push((recs[a].center, recs[a].big, recs[b - 1].small, slope));
        }
        a = b;
    }
    out
}

fn extremal(cloud: &PointCloud, stats: &CoveringStats, min_fit: usize, want_max: bool, method: &str) -> Result<DimensionEstimate> {
    let slopes = local_slopes(stats, min_fit);
    if slopes.is_empty() {
        return Err(Error::InsufficientData(format!("no (center, R) pair admits {min_fit} scale ratios")));
    }
    // ties go to the lexicographically smallest (center, R, r)
    let mut sorted = slopes.clone();
    sorted.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2)));
    let mut best = sorted[0];
    for s in &sorted[1..] {
        if (want_max && s.3 > best.3) || (!want_max && s.3 < best.3) {
            best = *s;
        }
    }
    let vals: Vec<f64> = slopes.iter().map(|s| s.3).collect();
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    let spread = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64).sqrt();
    Ok(DimensionEstimate {
        value: best.3.clamp(0.0, cloud.dim as f64),
        method: method.into(),
        scale_range: stats.scale_range,
        witness: Some(Witness { center_index: best.0, center: cloud.points[best.0], big: best.1, small: best.2 }),
        diagnostics: vec![
            ("raw_value".into(), best.3),
            ("mean_local_slope".into(), mean),
            ("slope_spread".into(), spread),
            ("pairs".into(), slopes.len() as f64),
        ],
    })
}

/// Largest local covering exponent over sampled centers and radii; a lower
/// bound for the Assouad dimension up to resolution effects.
pub fn assouad_dimension(cloud: &PointCloud, params: &LocalParams) -> Result<DimensionEstimate> {
    let stats = covering_stats(cloud, params)?;
    extremal(cloud, &stats, params.min_fit, true, "assouad (max local covering slope, lower bound)")
}

/// Smallest local covering exponent; an upper bound for the lower dimension
/// up to resolution effects.
pub fn lower_dimension(cloud: &PointCloud, params: &LocalParams) -> Result<DimensionEstimate> {
    let stats = covering_stats(cloud, params)?;
    extremal(cloud, &stats, params.min_fit, false, "lower (min local covering slope, upper bound)")
}

/// Recomputes the local exponent at a single (center, R, smallest r).
pub fn local_exponent(cloud: &PointCloud, center: usize, big: f64, small: f64, params: &LocalParams) -> Result<f64> {
    let p = LocalParams {
        r_min: Some(small),
        r_max: Some(big),
        max_ratio: params.max_ratio,
        min_fit: params.min_fit,
        base: params.base,
        centers: Centers::Indices(vec![center]),
        seed: params.seed,
    };
    let stats = covering_stats(cloud, &p)?;
    local_slopes(&stats, params.min_fit)
        .into_iter()
        .find(|s| (s.1 - big).abs() <= 1e-12 * big && (s.2 - small).abs() <= 1e-12 * small)
        .map(|s| s.3)
        .ok_or_else(|| Error::InsufficientData(format!("witness scales do not admit {} ratios", params.min_fit)))
}
