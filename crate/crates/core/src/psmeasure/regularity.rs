use rayon::prelude::*;

use super::measure::EmpiricalMeasure;
use crate::error::{Error, Result};
use crate::estdim::least_squares;
use crate::spatial::{farthest_point_sample, P3};

/// Fewest atoms a regularity estimate accepts.
pub const MIN_ATOMS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Upper,
    Lower,
}

/// Scale ladder and centers for the regularity estimators.
///
/// Radii form the ladder `r_min * base^k` up to `r_max`; every pair
/// `r < R` on it with `min_ratio <= R / r <= max_ratio` is tested at every
/// center.
#[derive(Clone, Debug, PartialEq)]
pub struct RegularityParams {
    /// Defaults to twice the measure's resolution.
    pub r_min: Option<f64>,
    /// Defaults to a quarter of the atom set's diameter.
    pub r_max: Option<f64>,
    pub base: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Farthest-point sample of atoms used as centers.
    pub farthest: usize,
    /// Adds every charted cusp point and, for each, the points `f^n(q)`
    /// approaching it for these `n`.
    pub cusp_centers: bool,
    pub approach_steps: Vec<i64>,
    /// Further centers.
    pub extra: Vec<P3>,
}

impl Default for RegularityParams {
    fn default() -> Self {
        Self {
            r_min: None,
            r_max: None,
            base: 2.0,
            min_ratio: 64.0,
            max_ratio: f64::INFINITY,
            farthest: 256,
            cusp_centers: true,
            approach_steps: vec![4, 16, 64, -4, -16, -64],
            extra: vec![],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegularityWitness {
    pub center: P3,
    pub big: f64,
    pub small: f64,
    pub mass_big: f64,
    pub mass_small: f64,
}

impl RegularityWitness {
    /// `ln(mu(B(x, R)) / mu(B(x, r))) / ln(R / r)`.
    pub fn exponent(&self) -> f64 {
        (self.mass_big / self.mass_small).ln() / (self.big / self.small).ln()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegularityEstimate {
    pub value: f64,
    pub direction: Direction,
    pub witness: RegularityWitness,
    pub scale_range: (f64, f64),
    pub centers: usize,
    pub pairs: usize,
}

/// Ladder of radii from `lo` to `hi` with ratio `base`.
fn ladder(lo: f64, hi: f64, base: f64) -> Vec<f64> {
    let mut v = vec![lo];
    while v.last().unwrap() * base <= hi * (1.0 + 1e-12) {
        v.push(v.last().unwrap() * base);
    }
    v
}

fn centers(mu: &EmpiricalMeasure, p: &RegularityParams) -> Vec<P3> {
    let mut out = vec![];
    if p.cusp_centers {
        for ch in mu.charts() {
            out.push(ch.point);
            let q = ch.reference_coordinate();
            for &n in &p.approach_steps {
                out.push(ch.translate_point(q, n));
            }
        }
    }
    out.extend(p.extra.iter().copied());
    let mut fps = farthest_point_sample(mu.atoms(), p.farthest);
    fps.sort_unstable();
    out.extend(fps.into_iter().map(|i| mu.atoms()[i]));
    out
}

fn better(direction: Direction, v: f64, b: f64) -> bool {
    match direction {
        Direction::Upper => v > b,
        Direction::Lower => v < b,
    }
}

fn estimate(mu: &EmpiricalMeasure, params: &RegularityParams, directions: &[Direction]) -> Result<Vec<RegularityEstimate>> {
    if mu.len() < MIN_ATOMS {
        return Err(Error::InsufficientData(format!("{} atoms; regularity needs at least {MIN_ATOMS}", mu.len())));
    }
    if !(params.base > 1.0) || !(params.min_ratio >= 8.0) || !(params.max_ratio >= params.min_ratio) {
        return Err(Error::InvalidParameter("need base > 1 and 8 <= min_ratio <= max_ratio".into()));
    }
    let r_min = params.r_min.unwrap_or(2.0 * mu.resolution);
    if r_min < mu.resolution {
        return Err(Error::Precondition(format!(
            "scale {r_min:e} is below the measure's resolution {:e}",
            mu.resolution
        )));
    }
    let r_max = params.r_max.unwrap_or(mu.support()?.diameter_bound() / 4.0);
    let radii = ladder(r_min, r_max, params.base);
    let pairs: Vec<(usize, usize)> = (0..radii.len())
        .flat_map(|i| (i + 1..radii.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| {
            let q = radii[j] / radii[i];
            q >= params.min_ratio * (1.0 - 1e-12) && q <= params.max_ratio * (1.0 + 1e-12)
        })
        .collect();
    if pairs.is_empty() {
        return Err(Error::Precondition(format!(
            "scale window [{r_min:e}, {r_max:e}] holds no pair with ratio at least {}",
            params.min_ratio
        )));
    }
    let xs = centers(mu, params);
    let table: Vec<Vec<f64>> = xs.par_iter().map(|x| radii.iter().map(|&r| mu.mass(x, r)).collect()).collect();
    directions
        .iter()
        .map(|&direction| {
            // first center and pair win ties
            let mut best: Option<(f64, RegularityWitness)> = None;
            for (x, masses) in xs.iter().zip(&table) {
                for &(i, j) in &pairs {
                    if !(masses[i] > 0.0) {
                        continue;
                    }
                    let w = RegularityWitness { center: *x, big: radii[j], small: radii[i], mass_big: masses[j], mass_small: masses[i] };
                    let v = w.exponent();
                    if best.as_ref().is_none_or(|(b, _)| better(direction, v, *b)) {
                        best = Some((v, w));
                    }
                }
            }
            let (value, witness) = best.ok_or_else(|| Error::InsufficientData("every small ball has zero mass".into()))?;
            Ok(RegularityEstimate { value, direction, witness, scale_range: (r_min, r_max), centers: xs.len(), pairs: pairs.len() })
        })
        .collect()
}

/// Upper and lower estimates from one table of ball masses.
pub fn regularity(mu: &EmpiricalMeasure, params: &RegularityParams) -> Result<(RegularityEstimate, RegularityEstimate)> {
    let mut v = estimate(mu, params, &[Direction::Upper, Direction::Lower])?;
    let lower = v.pop().unwrap();
    Ok((v.pop().unwrap(), lower))
}

/// Largest exponent of concentric mass ratios over centers and scale
/// pairs: an estimate of the upper regularity dimension from below.
pub fn upper_regularity(mu: &EmpiricalMeasure, params: &RegularityParams) -> Result<RegularityEstimate> {
    Ok(estimate(mu, params, &[Direction::Upper])?.remove(0))
}

/// Smallest exponent of concentric mass ratios: an estimate of the lower
/// regularity dimension from above.
pub fn lower_regularity(mu: &EmpiricalMeasure, params: &RegularityParams) -> Result<RegularityEstimate> {
    Ok(estimate(mu, params, &[Direction::Lower])?.remove(0))
}

/// Running slopes of `-ln mu(B(z, e^-t))` against `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalDimension {
    /// Smallest and largest slope over the four quarters of the window.
    pub lower: f64,
    pub upper: f64,
    /// Least-squares slope over the whole window.
    pub slope: f64,
}

/// Local dimension of `mu` at `z` over `t in [t0, t1]`, sampled every
/// 1/16 of the window.
pub fn local_dimension(mu: &EmpiricalMeasure, z: &P3, window: (f64, f64)) -> Result<LocalDimension> {
    let (t0, t1) = window;
    if !(t1 > t0) {
        return Err(Error::InvalidParameter(format!("empty window [{t0}, {t1}]")));
    }
    if (-t1).exp() < mu.resolution {
        return Err(Error::Precondition(format!(
            "radius e^-{t1} is below the measure's resolution {:e}",
            mu.resolution
        )));
    }
    if !(mu.mass(z, (-t0).exp()) > 0.0) {
        return Err(Error::InsufficientData(format!("zero mass at radius e^-{t0}")));
    }
    let n = 16;
    let ts: Vec<f64> = (0..=n).map(|i| t0 + (t1 - t0) * i as f64 / n as f64).collect();
    let ys: Vec<f64> = ts.iter().map(|&t| -mu.mass(z, (-t).exp()).ln()).collect();
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(Error::InsufficientData("zero mass inside the window".into()));
    }
    let (slope, _, _) = least_squares(&ts, &ys);
    let q = n / 4;
    let quarters: Vec<f64> = (0..4).map(|k| least_squares(&ts[k * q..=(k + 1) * q], &ys[k * q..=(k + 1) * q]).0).collect();
    Ok(LocalDimension {
        lower: quarters.iter().copied().fold(f64::INFINITY, f64::min),
        upper: quarters.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estdim::oracles::{cantor_measure, segment};
    use crate::group::CloudModel;

    fn triadic(depth: u32, lo: i32, hi: i32) -> (EmpiricalMeasure, RegularityParams) {
        let mu = cantor_measure(depth).unwrap();
        let p = RegularityParams {
            r_min: Some(3f64.powi(-lo)),
            r_max: Some(3f64.powi(-hi)),
            base: 3.0,
            farthest: 64,
            ..Default::default()
        };
        (mu, p)
    }

    #[test]
    fn cantor_balls_are_exact() {
        let mu = cantor_measure(9).unwrap();
        for k in 0..=9 {
            let m = mu.mass(&[0.0; 3], 3f64.powi(-k) * (1.0 + 1e-12));
            assert!((m - 0.5f64.powi(k)).abs() < 1e-12, "k={k}: {m}");
        }
    }

    #[test]
    fn cantor_regularity_is_its_dimension() {
        let (mu, p) = triadic(10, 8, 1);
        let (u, l) = regularity(&mu, &p).unwrap();
        let d = 2f64.ln() / 3f64.ln();
        assert!((u.value - d).abs() < 0.05, "{}", u.value);
        assert!((l.value - d).abs() < 0.05, "{}", l.value);
    }

    #[test]
    fn witness_reproduces_value() {
        let (mu, p) = triadic(9, 7, 1);
        for e in [upper_regularity(&mu, &p).unwrap(), lower_regularity(&mu, &p).unwrap()] {
            let w = &e.witness;
            let again = RegularityWitness {
                mass_big: mu.mass(&w.center, w.big),
                mass_small: mu.mass(&w.center, w.small),
                ..w.clone()
            };
            assert!((again.exponent() - e.value).abs() < 1e-9);
            assert!(w.big / w.small >= 64.0 * (1.0 - 1e-12));
        }
    }

    #[test]
    fn segment_is_one_regular() {
        let c = segment(4097, 0.0, 1.0).unwrap();
        let n = c.points.len();
        let mu = EmpiricalMeasure::new(CloudModel::Euclidean, 1, c.points, vec![1.0; n], c.resolution).unwrap();
        let p = RegularityParams { r_min: Some(1.0 / 256.0), r_max: Some(0.5), farthest: 32, ..Default::default() };
        let (u, l) = regularity(&mu, &p).unwrap();
        assert!(u.value >= l.value);
        assert!((u.value - 1.0).abs() < 0.2 && (l.value - 1.0).abs() < 0.2, "{} {}", u.value, l.value);
    }

    #[test]
    fn rejects_small_or_unresolved_input() {
        let mu = cantor_measure(3).unwrap();
        assert!(matches!(upper_regularity(&mu, &RegularityParams::default()), Err(Error::InsufficientData(_))));
        let mu = cantor_measure(6).unwrap();
        let p = RegularityParams { r_min: Some(mu.resolution / 2.0), ..Default::default() };
        assert!(matches!(lower_regularity(&mu, &p), Err(Error::Precondition(_))));
        let p = RegularityParams { r_min: Some(0.1), r_max: Some(0.2), ..Default::default() };
        assert!(matches!(lower_regularity(&mu, &p), Err(Error::Precondition(_))));
    }

    #[test]
    fn local_dimension_of_cantor() {
        let mu = cantor_measure(10).unwrap();
        let z = mu.atoms()[0];
        let ld = local_dimension(&mu, &z, (3f64.ln(), 8.0 * 3f64.ln())).unwrap();
        let d = 2f64.ln() / 3f64.ln();
        assert!((ld.slope - d).abs() < 0.1, "{ld:?}");
        assert!(ld.lower <= ld.slope && ld.slope <= ld.upper);
        assert!(matches!(local_dimension(&mu, &z, (1.0, 20.0)), Err(Error::Precondition(_))));
        assert!(matches!(local_dimension(&mu, &[5.0, 0.0, 0.0], (1.0, 2.0)), Err(Error::InsufficientData(_))));
    }
}
