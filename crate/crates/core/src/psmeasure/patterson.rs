use rayon::prelude::*;

use super::chart::{ChartCandidate, CuspChart, DEFAULT_UNFOLD_TERMS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::measure::EmpiricalMeasure;
use super::regularity::{local_dimension, regularity, RegularityParams};
use crate::error::{Error, Result};
use crate::estdim::{exponent_from_orbit, PRUNE_SLACK};
use crate::group::{enumerate_orbit, Orbit, find_cusps, translation_vector, Budget, CloudModel, Cusp, GroupPresentation};
use crate::hypgeom::Mobius;
use crate::spatial::dist;

/// Relative excess of the weighting exponent over the estimated
/// Poincaré exponent.
pub const DEFAULT_EPSILON: f64 = 0.05;

/// Construction parameters for [`patterson_measure_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureParams {
    /// Width of the distance shell whose orbit points become atoms.
    pub shell_width: f64,
    /// Word length searched for parabolic fixed points.
    pub cusp_word_len: usize,
    /// Most cusp charts installed (largest regions first).
    pub max_charts: usize,
    /// Largest chordal radius of a chart region.
    pub chart_radius: f64,
    /// Translates unfolded on each side of the fundamental domain.
    pub unfold_terms: usize,
}

impl Default for MeasureParams {
    fn default() -> Self {
        Self { shell_width: 3.0, cusp_word_len: 4, max_charts: 16, chart_radius: 0.1, unfold_terms: DEFAULT_UNFOLD_TERMS }
    }
}

/// Patterson-Sullivan approximation with default parameters.
pub fn patterson_measure(g: &GroupPresentation, s: f64, budget: Budget) -> Result<EmpiricalMeasure> {
    patterson_measure_with(g, s, budget, &MeasureParams::default())
}

/// Atoms at the boundary projections of orbit points `g(o)` with weights
/// proportional to `exp(-s d(o, g o))`.
///
/// Only a shell of the orbit is used: distances in
/// `[T - shell_width, T]` where `T` is the trusted enumeration depth, so
/// that every region of the limit set is represented at comparable
/// resolution. Near rank-one cusps found up to `cusp_word_len`, masses are
/// computed by unfolding (see [`EmpiricalMeasure`]) with the conformal
/// exponent set to the orbit growth rate.
///
/// Fails with `DivergentWeighting` when `s` does not exceed the measured
/// growth rate of the orbit.
pub fn patterson_measure_with(
    g: &GroupPresentation,
    s: f64,
    budget: Budget,
    params: &MeasureParams,
) -> Result<EmpiricalMeasure> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::InvalidParameter(format!("weighting exponent must be positive, got {s}")));
    }
    if !(params.shell_width > 0.0) {
        return Err(Error::InvalidParameter("shell width must be positive".into()));
    }
    let orbit = enumerate_orbit(g, budget)?;
    let growth = exponent_from_orbit(&orbit).ok().map(|e| e.value);
    from_orbit(g, &orbit, growth, s, budget, params)
}

fn from_orbit(
    g: &GroupPresentation,
    orbit: &Orbit,
    growth: Option<f64>,
    s: f64,
    budget: Budget,
    params: &MeasureParams,
) -> Result<EmpiricalMeasure> {
    if let Some(growth) = growth {
        if s <= growth {
            return Err(Error::DivergentWeighting { s, growth });
        }
    }
    let reach = orbit.points.iter().map(|p| p.dist).fold(0.0, f64::max);
    let t_hi = (orbit.complete_dist - PRUNE_SLACK).min(reach).max(0.0);
    let t_lo = t_hi - params.shell_width;
    let shell: Vec<_> = orbit.points.iter().filter(|p| p.dist >= t_lo && p.dist <= t_hi).collect();
    let atoms: Vec<_> = shell.iter().map(|p| p.projection()).collect();
    let weights: Vec<f64> = shell.iter().map(|p| (-s * (p.dist - t_hi)).exp()).collect();
    let resolution = (-t_lo).exp().min(2.0);
    let mut mu = EmpiricalMeasure::new(CloudModel::Ball, g.dim(), atoms, weights, resolution)?;
    mu.exponent = Some(s);

    let mut charts: Vec<CuspChart> = vec![];
    if let (Some(delta), true) = (growth, params.max_charts > 0) {
        let cusps = find_cusps(g, params.cusp_word_len)?;
        let mut candidates: Vec<ChartCandidate> = cusps
            .cusps
            .iter()
            .filter(|c| c.rank == 1)
            .filter_map(|c| {
                let f = shortest_translation(c)?;
                ChartCandidate::new(&c.point, f, mu.atoms(), mu.weights(), params.chart_radius)
            })
            .filter(|ch| ch.radius >= 32.0 * resolution)
            .collect();
        candidates.sort_by(|a, b| b.radius.total_cmp(&a.radius).then(a.point.partial_cmp(&b.point).unwrap()));
        let mut chosen: Vec<ChartCandidate> = vec![];
        for ch in candidates {
            if chosen.len() >= params.max_charts {
                break;
            }
            if chosen.iter().all(|o| dist(&o.point, &ch.point) > o.radius + ch.radius) {
                chosen.push(ch);
            }
        }
        charts = chosen
            .into_par_iter()
            .filter_map(|ch| ch.into_chart(delta, mu.atoms(), mu.weights(), params.unfold_terms))
            .collect();
    }
    let provenance = format!(
        "s={s}, growth={}, shell=[{t_lo:.3}, {t_hi:.3}], atoms={}, charts={}, orbit={} points (max_word_len={}, max_dist={}, max_points={}){}",
        growth.map_or("unknown".to_string(), |x| format!("{x:.4}")),
        mu.len(),
        charts.len(),
        orbit.len(),
        budget.max_word_len,
        budget.max_dist,
        budget.max_points,
        if orbit.truncated() { ", truncated" } else { "" },
    );
    Ok(mu.with_charts(charts).with_provenance(provenance))
}

/// Stabilizer translation of a cusp with the shortest translation vector.
pub(crate) fn shortest_translation(c: &Cusp) -> Option<&Mobius<f64>> {
    let to_inf = Mobius::sending_to_infinity(&c.point);
    c.stabilizer_translations
        .iter()
        .min_by(|a, b| {
            let va = translation_vector(&a.conjugate_by(&to_inf)).norm();
            let vb = translation_vector(&b.conjugate_by(&to_inf)).norm();
            va.total_cmp(&vb)
        })
}

/// Regularity and typical local dimension of the measures built at two
/// weighting exponents.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub s: f64,
    pub upper: f64,
    pub lower: f64,
    /// Median local-dimension slope over sampled atoms.
    pub typical: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub growth: f64,
    pub epsilon: f64,
    /// At `s = growth (1 + epsilon)` and `growth (1 + epsilon / 2)`.
    pub rows: [ConvergenceRow; 2],
    /// Largest absolute change between the rows.
    pub max_change: f64,
}

/// Builds the measure at `epsilon` and `epsilon / 2` above the measured
/// growth rate from one orbit and compares the estimates. Local
/// dimensions use `samples` atoms (seeded) over the window `t_window`.
pub fn convergence_diagnostic(
    g: &GroupPresentation,
    budget: Budget,
    params: &MeasureParams,
    epsilon: f64,
    reg: &RegularityParams,
    samples: usize,
    t_window: (f64, f64),
    seed: u64,
) -> Result<ConvergenceReport> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let orbit = enumerate_orbit(g, budget)?;
    let growth = exponent_from_orbit(&orbit)?.value;
    let row = |s: f64| -> Result<ConvergenceRow> {
        let mu = from_orbit(g, &orbit, Some(growth), s, budget, params)?;
        let (u, l) = regularity(&mu, reg)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut slopes = (0..samples.max(1))
            .map(|_| local_dimension(&mu, &mu.atoms()[rng.gen_range(0..mu.len())], t_window).map(|d| d.slope))
            .collect::<Result<Vec<f64>>>()?;
        slopes.sort_by(f64::total_cmp);
        Ok(ConvergenceRow { s, upper: u.value, lower: l.value, typical: slopes[slopes.len() / 2] })
    };
    let a = row(growth * (1.0 + epsilon))?;
    let b = row(growth * (1.0 + epsilon / 2.0))?;
    let max_change = [(a.upper - b.upper).abs(), (a.lower - b.lower).abs(), (a.typical - b.typical).abs()]
        .into_iter()
        .fold(0.0, f64::max);
    Ok(ConvergenceReport { growth, epsilon, rows: [a, b], max_change })
}
