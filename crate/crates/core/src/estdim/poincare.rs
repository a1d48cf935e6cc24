use super::estimate::{least_squares, DimensionEstimate};
use crate::error::{Error, Result};
use crate::group::{enumerate_orbit, Budget, GroupPresentation, Orbit};

/// Distance below the enumeration limit beyond which orbit counts are not
/// trusted (children pruned at the limit can have closer descendants).
pub const PRUNE_SLACK: f64 = 2.5;
/// Shortest admissible counting window.
pub const MIN_WINDOW: f64 = 3.0;

/// Orbital counting estimate of the Poincaré exponent from an enumerated
/// orbit: slope of `ln N(T)` against `T` over `[T_lo, T_hi]`, where `T_hi`
/// is the trusted distance and `T_lo = min(T_hi / 2, T_hi - 3)`.
///
/// The annulus sums `sum_{d in [n, n+1)} e^{-s d}` give a cross-check: their
/// growth rate brackets the critical exponent and is reported with the
/// disagreement.
pub fn exponent_from_orbit(orbit: &Orbit) -> Result<DimensionEstimate> {
    let hi = orbit.complete_dist - PRUNE_SLACK;
    let lo = (hi / 2.0).min(hi - MIN_WINDOW);
    if !(lo > 0.0) {
        return Err(Error::InsufficientData(format!(
            "orbit complete only to distance {:.3}; a {MIN_WINDOW}-unit counting window needs more",
            orbit.complete_dist
        )));
    }
    let n = 64;
    let ts: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let ys: Vec<f64> = ts.iter().map(|&t| (orbit.count_within(t) as f64).ln()).collect();
    let (slope, _, rms) = least_squares(&ts, &ys);

    // unit annuli inside the window
    let first = lo.ceil() as i64;
    let last = hi.floor() as i64;
    let mut ns = vec![];
    let mut las = vec![];
    for k in first..last {
        let a = orbit.count_within(k as f64 + 1.0) - orbit.count_within(k as f64);
        if a > 0 {
            ns.push(k as f64);
            las.push((a as f64).ln());
        }
    }
    let mut diagnostics = vec![("counting_slope".into(), slope), ("counting_residual".into(), rms)];
    if ns.len() >= 2 {
        let (s_ann, _, _) = least_squares(&ns, &las);
        let steps: Vec<f64> = las.windows(2).zip(ns.windows(2)).map(|(y, x)| (y[1] - y[0]) / (x[1] - x[0])).collect();
        let s_lo = steps.iter().copied().fold(f64::INFINITY, f64::min);
        let s_hi = steps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        diagnostics.push(("annulus_slope".into(), s_ann));
        diagnostics.push(("annulus_bracket_lo".into(), s_lo));
        diagnostics.push(("annulus_bracket_hi".into(), s_hi));
        diagnostics.push(("disagreement".into(), (s_ann - slope).abs()));
    }
    diagnostics.push(("orbit_points".into(), orbit.len() as f64));
    diagnostics.push(("truncated".into(), if orbit.truncated() { 1.0 } else { 0.0 }));
    Ok(DimensionEstimate {
        value: slope.max(0.0),
        method: "orbital counting".into(),
        scale_range: (lo, hi),
        witness: None,
        diagnostics,
    })
}

/// Poincaré exponent estimate for `g` at the given orbit budget.
pub fn poincare_exponent(g: &GroupPresentation, budget: Budget) -> Result<DimensionEstimate> {
    exponent_from_orbit(&enumerate_orbit(g, budget)?)
}

/// Default budget: ~10^6 orbit points within distance 12.
pub fn exponent_budget() -> Budget {
    Budget::new(usize::MAX, 12.0, 1_000_000)
}
