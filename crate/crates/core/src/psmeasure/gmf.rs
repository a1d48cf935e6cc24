use std::fmt::Write as _;

use super::measure::EmpiricalMeasure;
use crate::error::{Error, Result};
use crate::estdim::{exponent_budget, least_squares, poincare_exponent};
use crate::group::{find_cusps, horoball_budget, standard_horoballs, GroupPresentation, HoroballFamily};
use crate::hypgeom::{geodesic_point_from_origin, BoundaryPoint, Horoball, InteriorPoint, Model};
use crate::spatial::{dist, KdTree, P3};

/// Which value of the Poincaré exponent a context uses.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DeltaSource {
    /// Orbital counting estimate.
    Estimate,
    /// The group's known profile, falling back to the estimate.
    KnownProfile,
    Value(f64),
}

/// Horoballs grouped by size class, with a k-d tree of ball-model centres
/// per class for containment queries.
#[derive(Clone, Debug)]
struct SizeClasses {
    classes: Vec<(f64, Vec<usize>, KdTree)>,
}

/// Ball-model centre and radius of a horoball.
fn ball_sphere(h: &Horoball<f64>) -> (P3, f64) {
    let v = h.base().sphere_vec();
    let r = h.size() / 2.0;
    ([v[0] * (1.0 - r), v[1] * (1.0 - r), v[2] * (1.0 - r)], r)
}

impl SizeClasses {
    fn new(family: &HoroballFamily) -> Self {
        let mut by_class: std::collections::BTreeMap<i32, Vec<usize>> = Default::default();
        for (i, h) in family.horoballs.iter().enumerate() {
            by_class.entry(h.size().log2().floor() as i32).or_default().push(i);
        }
        let classes = by_class
            .into_values()
            .map(|idx| {
                let centres: Vec<P3> = idx.iter().map(|&i| ball_sphere(&family.horoballs[i]).0).collect();
                let r_max = idx.iter().map(|&i| family.horoballs[i].size() / 2.0).fold(0.0, f64::max);
                (r_max, idx, KdTree::new(&centres, 3))
            })
            .collect();
        Self { classes }
    }

    /// Index of the horoball whose interior contains `x`.
    fn containing(&self, family: &HoroballFamily, x: &P3) -> Option<usize> {
        let mut found = None;
        for (r_max, idx, tree) in &self.classes {
            tree.within(x, *r_max, |j| {
                let (c, r) = ball_sphere(&family.horoballs[idx[j]]);
                if found.is_none() && dist(&c, x) < r {
                    found = Some(idx[j]);
                }
            });
            if found.is_some() {
                break;
            }
        }
        found
    }
}

/// Data for the global measure formula: the exponent `delta`, a standard
/// horoball family and the base point (the ball origin).
#[derive(Clone, Debug)]
pub struct GMFContext {
    pub delta: f64,
    pub family: HoroballFamily,
    classes: SizeClasses,
    bases: KdTree,
}

impl GMFContext {
    /// Requires `delta > k / 2` for every rank in the family.
    pub fn new(delta: f64, family: HoroballFamily) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
        }
        if let Some(k) = family.ranks().find(|&k| !(delta > k as f64 / 2.0)) {
            return Err(Error::Precondition(format!(
                "delta = {delta} does not exceed k / 2 = {} for a rank-{k} cusp",
                k as f64 / 2.0
            )));
        }
        let classes = SizeClasses::new(&family);
        let bases: Vec<P3> = family.horoballs.iter().map(|h| h.base().sphere_vec()).collect();
        let bases = KdTree::new(&bases, 3);
        Ok(Self { delta, family, classes, bases })
    }

    /// Context for a group: cusps up to word length 4 and the standard
    /// family down to ball diameter `min_diameter`.
    pub fn for_group(g: &GroupPresentation, delta: DeltaSource, min_diameter: f64) -> Result<Self> {
        let delta = match (delta, g.known_profile()) {
            (DeltaSource::Value(d), _) => d,
            (DeltaSource::KnownProfile, Some(p)) => p.delta,
            _ => poincare_exponent(g, exponent_budget())?.value,
        };
        let cusps = find_cusps(g, 4)?;
        let mut family = standard_horoballs(g, &cusps, min_diameter, horoball_budget(min_diameter, 1))?;
        if family.halvings > 1 {
            // deeper references need a deeper orbit to reach the same sizes
            family = standard_horoballs(g, &cusps, min_diameter, horoball_budget(min_diameter, family.halvings))?;
        }
        Self::new(delta, family)
    }

    pub fn base(&self) -> InteriorPoint<f64> {
        InteriorPoint::origin(Model::Ball, self.dim())
    }

    fn dim(&self) -> usize {
        self.family.horoballs.first().map_or(2, |h| h.dim())
    }
}

/// Distance between the horospheres of diameters `big > small` (ball
/// model) sharing a base point.
fn horosphere_gap(big: f64, small: f64) -> f64 {
    ((big * (2.0 - small)) / (small * (2.0 - big))).ln()
}

/// `(k(z, t), rho(z, t))`: the rank and escape depth of the family horoball
/// containing `z_t`, the point at distance `t` from the base point on the
/// ray to `z`; `(0, 0)` outside all horoballs.
pub fn k_and_rho(ctx: &GMFContext, z: &BoundaryPoint<f64>, t: f64) -> Result<(usize, f64)> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("t must be positive, got {t}")));
    }
    if ctx.family.is_empty() {
        return Ok((0, 0.0));
    }
    let x = geodesic_point_from_origin(&z.to_sphere(), t, Model::Ball)?;
    let mut c = [0.0; 3];
    c[..x.coords().len()].copy_from_slice(x.coords());
    let Some(i) = ctx.classes.containing(&ctx.family, &c) else {
        return Ok((0, 0.0));
    };
    let h = &ctx.family.horoballs[i];
    let b = h.base().sphere_vec();
    // diameter |x - b|^2 / (1 - x.b) of the horoball at b through
    // x = tanh(t/2) z, written without cancellation
    let zv = z.sphere_vec();
    let eps = 2.0 / (t.exp() + 1.0);
    let tau = 1.0 - eps;
    let gamma = (0..3).map(|k| (zv[k] - b[k]).powi(2)).sum::<f64>() / 2.0;
    let through = (eps * eps + 2.0 * tau * gamma) / (eps + tau * gamma);
    Ok((h.rank(), horosphere_gap(h.size(), through).max(0.0)))
}

/// Global measure formula `exp(-t delta - rho (delta - k))`.
pub fn gmf(ctx: &GMFContext, z: &BoundaryPoint<f64>, t: f64) -> Result<f64> {
    let (k, rho) = k_and_rho(ctx, z, t)?;
    Ok((-t * ctx.delta - rho * (ctx.delta - k as f64)).exp())
}

/// Sum of `|H_p|^delta` over family horoballs based in `B(z, e^-t)` with
/// `e^-T <= |H_p| < e^-t` (ball-model diameters, chordal balls).
pub fn horoball_sum(ctx: &GMFContext, z: &BoundaryPoint<f64>, t: f64, big_t: f64) -> Result<f64> {
    if !(t > 0.0 && big_t > t) {
        return Err(Error::InvalidParameter(format!("need T > t > 0, got t = {t}, T = {big_t}")));
    }
    let (lo, hi) = ((-big_t).exp(), (-t).exp());
    let mut sum = 0.0;
    ctx.bases.within(&z.sphere_vec(), hi, |i| {
        let d = ctx.family.horoballs[i].size();
        if d >= lo && d < hi {
            sum += d.powf(ctx.delta);
        }
    });
    Ok(sum)
}

/// One row of a global measure formula comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct GmfRow {
    pub z: P3,
    pub t: f64,
    pub k: usize,
    pub rho: f64,
    pub mass: f64,
    pub gmf: f64,
    /// `ln(mass / gmf)`.
    pub log_ratio: f64,
}

/// Comparison of empirical ball masses with the global measure formula.
#[derive(Clone, Debug, PartialEq)]
pub struct GmfReport {
    pub delta: f64,
    pub rows: Vec<GmfRow>,
    /// Least-squares slope of the log ratio against `t`.
    pub drift: f64,
    /// Largest minus smallest log ratio.
    pub spread: f64,
}

impl GmfReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# global measure formula check");
        let _ = writeln!(s, "delta = {}", self.delta);
        let _ = writeln!(s, "samples = {}", self.rows.len());
        let _ = writeln!(s, "drift = {}", self.drift);
        let _ = writeln!(s, "spread = {}", self.spread);
        let _ = writeln!(s, "t,k,rho,mass,gmf,log_ratio");
        for r in &self.rows {
            let _ = writeln!(s, "{},{},{},{},{},{}", r.t, r.k, r.rho, r.mass, r.gmf, r.log_ratio);
        }
        s
    }
}

/// Evaluates `mu(B(z, e^-t))` against the formula for each sample. Samples
/// with zero empirical mass are reported as errors.
pub fn gmf_report(ctx: &GMFContext, mu: &EmpiricalMeasure, samples: &[(BoundaryPoint<f64>, f64)]) -> Result<GmfReport> {
    let mut rows = vec![];
    for (z, t) in samples {
        let (k, rho) = k_and_rho(ctx, z, *t)?;
        let g = (-t * ctx.delta - rho * (ctx.delta - k as f64)).exp();
        let zv = z.to_sphere().sphere_vec();
        let mass = mu.mass(&zv, (-t).exp());
        if !(mass > 0.0) {
            return Err(Error::InsufficientData(format!("zero mass in B(z, e^-{t})")));
        }
        rows.push(GmfRow { z: zv, t: *t, k, rho, mass, gmf: g, log_ratio: (mass / g).ln() });
    }
    if rows.len() < 2 {
        return Err(Error::InsufficientData("need at least two samples".into()));
    }
    let ts: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let ls: Vec<f64> = rows.iter().map(|r| r.log_ratio).collect();
    let (drift, _, _) = least_squares(&ts, &ls);
    let spread = ls.iter().copied().fold(f64::NEG_INFINITY, f64::max) - ls.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(GmfReport { delta: ctx.delta, rows, drift, spread })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypgeom::{escape_depth, geodesic_point};

    fn ctx_with(hs: Vec<Horoball<f64>>, delta: f64) -> GMFContext {
        GMFContext::new(delta, HoroballFamily::from_horoballs(hs).unwrap()).unwrap()
    }

    #[test]
    fn empty_family_reduces_to_power_law() {
        let ctx = GMFContext::new(0.7, HoroballFamily::empty()).unwrap();
        let z = BoundaryPoint::real(0.3);
        assert_eq!(k_and_rho(&ctx, &z, 10.0).unwrap(), (0, 0.0));
        assert!((gmf(&ctx, &z, 10.0).unwrap() - (-7.0f64).exp()).abs() < 1e-18);
    }

    #[test]
    fn height_ratio_at_infinity() {
        let h = Horoball::new(BoundaryPoint::infinity(2), 1.0, 2).unwrap();
        let ctx = ctx_with(vec![h], 1.5);
        let (k, rho) = k_and_rho(&ctx, &BoundaryPoint::infinity(2), 2.0).unwrap();
        assert_eq!(k, 2);
        assert!((rho - 2.0).abs() < 1e-9, "{rho}");
    }

    #[test]
    fn closed_form_depth_matches_generic() {
        let h = Horoball::new(BoundaryPoint::complex(num_complex::Complex64::new(0.4, -0.2)), 0.5, 1).unwrap();
        let ctx = ctx_with(vec![h], 1.0);
        let z = BoundaryPoint::complex(num_complex::Complex64::new(0.41, -0.19));
        for t in [1.0, 2.0, 3.0, 5.0] {
            let (_, rho) = k_and_rho(&ctx, &z, t).unwrap();
            let x = geodesic_point(&z, t, &InteriorPoint::origin(Model::HalfSpace, 2)).unwrap();
            let generic = escape_depth(&x, &h).unwrap();
            assert!((rho - generic).abs() < 1e-8, "t={t}: {rho} vs {generic}");
        }
    }

    #[test]
    fn base_point_depth_grows_linearly() {
        let h = Horoball::new(BoundaryPoint::real(0.5), 0.2, 1).unwrap();
        let ctx = ctx_with(vec![h], 0.8);
        let z = BoundaryPoint::real(0.5);
        let (entry, _) = h.ray_interval(&z, &InteriorPoint::origin(Model::HalfSpace, 1)).unwrap().unwrap();
        for t in [entry + 1.0, entry + 5.0, entry + 20.0] {
            let (k, rho) = k_and_rho(&ctx, &z, t).unwrap();
            assert_eq!(k, 1);
            assert!((rho - (t - entry)).abs() < 1e-7, "{rho} vs {}", t - entry);
        }
    }

    #[test]
    fn formula_arithmetic() {
        // z_t at height e^10 sits 5 deep in the horoball of height e^5
        let h = Horoball::new(BoundaryPoint::infinity(1), 5f64.exp(), 1).unwrap();
        let ctx = ctx_with(vec![h], 1.305);
        let z = BoundaryPoint::infinity(1);
        let (k, rho) = k_and_rho(&ctx, &z, 10.0).unwrap();
        assert_eq!(k, 1);
        assert!((rho - 5.0).abs() < 1e-9);
        let g = gmf(&ctx, &z, 10.0).unwrap();
        assert!((g / 4.67e-7 - 1.0).abs() < 5e-3, "{g}");
        assert!((g / (-14.575f64).exp() - 1.0).abs() < 1e-8);
        // delta < k raises the value above the conical one
        let ctx2 = ctx_with(vec![h], 0.8);
        assert!(gmf(&ctx2, &z, 10.0).unwrap() > (-8.0f64).exp());
    }

    #[test]
    fn rejects_small_delta() {
        let h = Horoball::new(BoundaryPoint::infinity(2), 1.0, 2).unwrap();
        let e = GMFContext::new(1.0, HoroballFamily::from_horoballs(vec![h]).unwrap()).unwrap_err();
        assert!(matches!(e, Error::Precondition(_)));
    }

    #[test]
    fn horoball_sum_terms() {
        let h = Horoball::new(BoundaryPoint::sphere(1, &[0.0, 1.0]).unwrap(), (-2.0f64).exp(), 1).unwrap();
        let ctx = ctx_with(vec![h], 0.9);
        let z = BoundaryPoint::sphere(1, &[0.0, 1.0]).unwrap();
        let s = horoball_sum(&ctx, &z, 1.0, 3.0).unwrap();
        assert!((s - (-2.0 * 0.9f64).exp()).abs() < 1e-15);
        assert_eq!(horoball_sum(&ctx, &z, 2.5, 3.0).unwrap(), 0.0);
        assert_eq!(horoball_sum(&ctx, &z, 0.5, 1.5).unwrap(), 0.0);
    }
}
