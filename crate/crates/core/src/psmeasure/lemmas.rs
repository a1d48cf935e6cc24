use num_complex::Complex64;

use super::gmf::{horoball_sum, GMFContext};
use super::measure::EmpiricalMeasure;
use super::patterson::shortest_translation;
use crate::error::{Error, Result};
use crate::estdim::least_squares;
use crate::group::{translation_vector, Cusp, GroupPresentation};
use crate::hypgeom::{escape_depth, shadow, squeeze, BoundaryPoint, Horoball, InteriorPoint, Mobius, Model};

#[derive(Clone, Debug, PartialEq)]
pub struct SqueezeRow {
    pub theta: f64,
    /// Chordal radius of the shadow of the squeezed horoball.
    pub radius: f64,
    pub mass: f64,
    /// `theta^(2 delta - k) |H|^delta`.
    pub predicted: f64,
    /// `mass / predicted`, divided by its value at `theta = 1`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SqueezeReport {
    pub rows: Vec<SqueezeRow>,
    /// `mass / predicted` at `theta = 1`.
    pub calibration: f64,
    /// Least-squares slope of `ln mass` against `ln theta`.
    pub slope: f64,
    /// Largest over smallest ratio.
    pub spread: f64,
}

fn in_family<'a>(ctx: &'a GMFContext, h: &Horoball<f64>) -> Result<&'a Horoball<f64>> {
    let member = ctx
        .family
        .find(h.base())
        .filter(|m| (m.size() - h.ball_diameter()).abs() <= 1e-9 * m.size())
        .ok_or_else(|| Error::InvalidParameter("horoball is not a member of the context's family".into()))?;
    Ok(member)
}

/// Masses of the shadows of squeezed copies of a family horoball against
/// `theta^(2 delta - k(p)) |H|^delta`.
pub fn squeeze_mass_check(ctx: &GMFContext, mu: &EmpiricalMeasure, h: &Horoball<f64>, thetas: &[f64]) -> Result<SqueezeReport> {
    let h = in_family(ctx, h)?;
    if thetas.is_empty() {
        return Err(Error::InvalidParameter("no squeeze factors".into()));
    }
    let delta = ctx.delta;
    let k = h.rank() as f64;
    let base = ctx.base();
    let shadow_mass = |theta: f64| -> Result<(f64, f64, f64)> {
        let s = shadow(&squeeze(h, theta)?, &base)?;
        if s.radius < mu.resolution {
            return Err(Error::Precondition(format!(
                "shadow radius {:e} at theta {theta} is below the measure's resolution {:e}",
                s.radius, mu.resolution
            )));
        }
        let mass = mu.mass(&s.center.sphere_vec(), s.radius);
        let predicted = theta.powf(2.0 * delta - k) * h.size().powf(delta);
        Ok((s.radius, mass, predicted))
    };
    let (_, m1, p1) = shadow_mass(1.0)?;
    if !(m1 > 0.0) {
        return Err(Error::InsufficientData("shadow of the horoball carries no mass".into()));
    }
    let calibration = m1 / p1;
    let mut rows = vec![];
    for &theta in thetas {
        let (radius, mass, predicted) = shadow_mass(theta)?;
        rows.push(SqueezeRow { theta, radius, mass, predicted, ratio: mass / predicted / calibration });
    }
    let (slope, spread) = if rows.len() >= 2 && rows.iter().all(|r| r.mass > 0.0) {
        let xs: Vec<f64> = rows.iter().map(|r| r.theta.ln()).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.mass.ln()).collect();
        let hi = rows.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
        let lo = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
        (least_squares(&xs, &ys).0, hi / lo)
    } else {
        (f64::NAN, f64::INFINITY)
    };
    Ok(SqueezeReport { rows, calibration, slope, spread })
}

/// `horoball_sum(z, t, T) / ((T - t) mu(B(z, e^-t)))`, bounded for large
/// `t` by the horoball counting estimate.
pub fn counting_ratio(ctx: &GMFContext, mu: &EmpiricalMeasure, z: &BoundaryPoint<f64>, t: f64, big_t: f64) -> Result<f64> {
    if !(big_t > t && t > 0.0) {
        return Err(Error::InvalidParameter(format!("need T > t > 0, got t={t}, T={big_t}")));
    }
    let mass = mu.mass(&z.sphere_vec(), (-t).exp());
    if !(mass > 0.0) {
        return Err(Error::InsufficientData(format!("B(z, e^-{t}) carries no mass")));
    }
    Ok(horoball_sum(ctx, z, t, big_t)? / ((big_t - t) * mass))
}

/// Exit-point construction near a cusp.
#[derive(Clone, Debug, PartialEq)]
pub struct UregWitness {
    /// `f^n(z0)`.
    pub z: BoundaryPoint<f64>,
    pub t: f64,
    /// Time at which the ray to `z` leaves the horoball at the cusp.
    pub big_t: f64,
    /// Depth of `z_t` in the horoball.
    pub rho: f64,
    /// Chordal distance from `z` to the cusp.
    pub gap: f64,
}

impl UregWitness {
    /// `ln(mu(B(z, e^-t)) / mu(B(z, e^-T))) / (T - t)`.
    pub fn ratio_exponent(&self, mu: &EmpiricalMeasure) -> Result<f64> {
        let z = self.z.sphere_vec();
        let small = mu.mass(&z, (-self.big_t).exp());
        if !(small > 0.0) {
            return Err(Error::InsufficientData(format!("B(z, e^-{}) carries no mass", self.big_t)));
        }
        Ok((mu.mass(&z, (-self.t).exp()) / small).ln() / (self.big_t - self.t))
    }
}

/// Half-space coordinates with `p` at infinity.
struct Unfolded {
    c: Mobius<f64>,
    /// Height of the horosphere.
    level: f64,
    /// Image of the ball origin.
    o: (Complex64, f64),
}

fn uhs_distance(a: (Complex64, f64), b: (Complex64, f64)) -> f64 {
    let num = (a.0 - b.0).norm_sqr() + (a.1 - b.1).powi(2);
    (1.0 + num / (2.0 * a.1 * b.1)).acosh()
}

/// For the cusp `p` with shortest stabilizer translation `f`, takes
/// `z = f^n(z0)` where `z0` is the first generator image of `p` distinct
/// from `p`. `T` is the exit time of the ray from the origin to `z` from
/// the family horoball at `p`; `u` is the point of the horosphere, in the
/// plane of `p`, `z` and `z_T`, at distance 1 from `z_T` towards the
/// entry point; `t` is the time at which the ray meets the normal from
/// `u`, so that `rho(z, t) >= T - t - 1`.
///
/// Fails with `Precondition` when the ray misses the horoball or the
/// construction leaves it (`n` too small).
pub fn ureg_witness(ctx: &GMFContext, g: &GroupPresentation, cusp: &Cusp, n: i64) -> Result<UregWitness> {
    let dim = g.dim();
    let p = cusp.point;
    let f = shortest_translation(cusp).ok_or_else(|| Error::InvalidParameter("cusp has no stabilizer translation".into()))?;
    let h = *ctx
        .family
        .find(&p)
        .ok_or_else(|| Error::InvalidParameter("no family horoball at the cusp".into()))?;
    let z0 = (0..g.letter_count())
        .map(|l| g.letter_map(l as _).apply_boundary(&p))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .find(|q| q.chordal_distance(&p) > 1e-6)
        .ok_or_else(|| Error::Precondition("every generator fixes the cusp".into()))?;

    let hs = h.to_model(Model::HalfSpace);
    let c = Mobius::sending_to_infinity(&hs.base().to_plane());
    let un = {
        let level = hs.image(&c)?.size();
        let (w, ht) = c.apply_interior(&InteriorPoint::origin(Model::HalfSpace, dim))?.hs_parts();
        Unfolded { c, level, o: (w, ht) }
    };
    let v = translation_vector(&f.conjugate_by(&un.c));
    let w0 = match un.c.apply_boundary(&z0.to_plane())? {
        BoundaryPoint::Plane { z, .. } => z,
        _ => return Err(Error::Precondition("z0 coincides with the cusp".into())),
    };
    let wz = w0 + v * n as f64;
    let z = un.c.inverse().apply_boundary(&BoundaryPoint::Plane { dim, z: wz })?.to_sphere();

    // the ray is the semicircle over the line through wz and w_o, ending at wz
    let (wo, ho) = un.o;
    let so = (wo - wz).norm();
    if !(so > 0.0) {
        return Err(Error::Precondition("ray to z is vertical in cusp coordinates".into()));
    }
    let e = (wo - wz) / so;
    let sa = (so * so + ho * ho) / (2.0 * so);
    let radius = sa;
    let level = un.level;
    if !(radius > level) {
        return Err(Error::Precondition(format!("ray to z misses the horoball at n={n}")));
    }
    let half_chord = (radius * radius - level * level).sqrt();
    let (s_exit, s_entry) = (sa - half_chord, sa + half_chord);
    if s_exit >= so {
        return Err(Error::Precondition(format!("ray to z misses the horoball at n={n}")));
    }
    let at = |s: f64, ht: f64| (wz + e * s, ht);
    let big_t = uhs_distance(un.o, at(s_exit, level));
    let s_u = s_exit + 2.0 * level * 0.5f64.sinh();
    if s_u >= s_entry.min(so) {
        return Err(Error::Precondition(format!("horoball crossing too short for the witness at n={n}")));
    }
    let ht = (radius * radius - (s_u - sa).powi(2)).sqrt();
    let t = uhs_distance(un.o, at(s_u, ht));
    let rho = (ht / level).ln();
    Ok(UregWitness { z, t, big_t, rho, gap: z.chordal_distance(&p.to_sphere()) })
}

/// Depth of the ray point `z_t` in the family horoball at `p`, computed
/// directly.
pub fn ray_depth(h: &Horoball<f64>, z: &BoundaryPoint<f64>, t: f64) -> Result<f64> {
    let x = crate::hypgeom::geodesic_point_from_origin(z, t, Model::Ball)?;
    escape_depth(&x, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estdim::oracles::cantor_measure;
    use crate::group::{builtin, find_cusps, Params};
    use crate::hypgeom::Horoball;

    fn apollonian() -> (GroupPresentation, GMFContext, Cusp) {
        let g = builtin("apollonian", &Params::default()).unwrap();
        let ctx = GMFContext::for_group(&g, super::super::gmf::DeltaSource::Value(1.3045), 2e-2).unwrap();
        let cusp = find_cusps(&g, 2)
            .unwrap()
            .cusps
            .into_iter()
            .filter(|c| c.rank == 1 && ctx.family.find(&c.point).is_some())
            .max_by(|a, b| ctx.family.find(&a.point).unwrap().size().total_cmp(&ctx.family.find(&b.point).unwrap().size()))
            .unwrap();
        (g, ctx, cusp)
    }

    #[test]
    fn witness_satisfies_depth_bound() {
        let (g, ctx, cusp) = apollonian();
        let h = *ctx.family.find(&cusp.point).unwrap();
        let origin = InteriorPoint::origin(Model::Ball, g.dim());
        let mut last: Option<UregWitness> = None;
        for k in 2..=20 {
            let w = ureg_witness(&ctx, &g, &cusp, 1 << k).unwrap();
            assert!(w.rho >= w.big_t - w.t - 1.0 - 1e-6);
            assert!(w.t > 0.0 && w.t < w.big_t);
            let (_, exit) = h.ray_interval(&w.z, &origin).unwrap().unwrap();
            assert!((exit - w.big_t).abs() < 1e-7 * w.big_t, "{exit} vs {}", w.big_t);
            if k <= 10 {
                assert!((ray_depth(&h, &w.z, w.t).unwrap() - w.rho).abs() < 1e-6);
            }
            if let Some(prev) = last {
                assert!(w.big_t - w.t > prev.big_t - prev.t);
                assert!(w.gap < prev.gap);
            }
            last = Some(w);
        }
    }

    #[test]
    fn witness_needs_a_crossing() {
        let (g, ctx, cusp) = apollonian();
        let misses = (0..4).filter(|&n| ureg_witness(&ctx, &g, &cusp, n).is_err()).count();
        assert!(misses >= 1);
    }

    #[test]
    fn squeeze_self_normalizes() {
        let (_, ctx, cusp) = apollonian();
        let h = *ctx.family.find(&cusp.point).unwrap();
        let mu = cantor_measure(6).unwrap();
        let mu = EmpiricalMeasure::new(
            crate::group::CloudModel::Ball,
            2,
            mu.atoms().iter().map(|a| [a[0] * 0.5, 0.0, (1.0 - a[0] * a[0] * 0.25).sqrt()]).collect(),
            mu.weights().to_vec(),
            1e-4,
        )
        .unwrap();
        let r = squeeze_mass_check(&ctx, &mu, &h, &[1.0, 0.5]).unwrap();
        assert_eq!(r.rows[0].ratio, 1.0);
        assert!(matches!(squeeze_mass_check(&ctx, &mu, &h, &[1.5]), Err(Error::InvalidParameter(_))));
        let stranger = Horoball::new(*h.base(), h.size() * 0.5, 1).unwrap();
        assert!(matches!(squeeze_mass_check(&ctx, &mu, &stranger, &[1.0]), Err(Error::InvalidParameter(_))));
        assert!(matches!(counting_ratio(&ctx, &mu, &cusp.point, 2.0, 1.0), Err(Error::InvalidParameter(_))));
    }
}
