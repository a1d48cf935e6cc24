use num_complex::Complex;

use super::geodesic::straightening_map;
use super::mobius::Mobius;
use super::point::{BoundaryPoint, InteriorPoint, Model};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Horoball: a Euclidean ball tangent to the boundary at `base`.
///
/// `size` is the Euclidean diameter in the model of `base` (ball model when
/// `base` is a sphere point, half-space otherwise), or the height of the
/// bounding plane when `base` is infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Horoball<T> {
    base: BoundaryPoint<T>,
    size: T,
    rank: usize,
}

impl<T: Scalar> Horoball<T> {
    pub fn new(base: BoundaryPoint<T>, size: T, rank: usize) -> Result<Self> {
        if !(size > T::zero()) || !size.is_finite() {
            return Err(Error::InvalidParameter(format!("horoball size must be positive, got {size}")));
        }
        if base.model() == Model::Ball && size >= T::two() {
            return Err(Error::InvalidParameter("ball-model horoball diameter must be < 2".into()));
        }
        if rank < 1 || rank > base.dim() {
            return Err(Error::InvalidParameter(format!("rank {rank} outside [1, {}]", base.dim())));
        }
        Ok(Self { base, size, rank })
    }

    pub fn base(&self) -> &BoundaryPoint<T> {
        &self.base
    }

    pub fn size(&self) -> T {
        self.size
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// Horoball with the given base passing through the interior point `q`.
    pub fn through_point(base: BoundaryPoint<T>, q: &InteriorPoint<T>, rank: usize) -> Result<Self> {
        let size = match base {
            BoundaryPoint::Sphere { dim, v } => {
                let b = q.to_ball();
                let c = b.coords();
                let mut diff2 = T::zero();
                let mut dot = T::zero();
                for i in 0..=dim {
                    diff2 = diff2 + (c[i] - v[i]) * (c[i] - v[i]);
                    dot = dot + c[i] * v[i];
                }
                diff2 / (T::one() - dot)
            }
            BoundaryPoint::Plane { z, .. } => {
                let (w, h) = q.to_half_space().hs_parts();
                ((w - z).norm_sqr() + h * h) / h
            }
            BoundaryPoint::Infinity { .. } => q.to_half_space().hs_parts().1,
        };
        Self::new(base, size, rank)
    }

    /// A point of the bounding horosphere: the innermost point for ball and
    /// finite half-space horoballs, (0, height) for a horoball at infinity.
    pub fn horosphere_point(&self) -> InteriorPoint<T> {
        match self.base {
            BoundaryPoint::Sphere { dim, v } => {
                let mut c = [T::zero(); 3];
                for i in 0..=dim {
                    c[i] = (T::one() - self.size) * v[i];
                }
                InteriorPoint::from_raw(Model::Ball, dim, c)
            }
            BoundaryPoint::Plane { dim, z } => InteriorPoint::from_hs_parts(dim, z, self.size),
            BoundaryPoint::Infinity { dim } => {
                InteriorPoint::from_hs_parts(dim, Complex::new(T::zero(), T::zero()), self.size)
            }
        }
    }

    pub fn to_model(&self, model: Model) -> Self {
        if self.base.model() == model {
            return *self;
        }
        let base = self.base.to_model(model);
        Self::through_point(base, &self.horosphere_point(), self.rank).expect("model change keeps validity")
    }

    /// Image under an isometry, in the model of `self`.
    pub fn image(&self, g: &Mobius<T>) -> Result<Self> {
        let base = g.apply_boundary(&self.base)?;
        let q = g.apply_interior(&self.horosphere_point())?;
        Self::through_point(base, &q, self.rank)
    }

    /// Diameter of the ball-model representative.
    pub fn ball_diameter(&self) -> T {
        self.to_model(Model::Ball).size
    }

    pub fn contains(&self, x: &InteriorPoint<T>) -> Result<bool> {
        Ok(escape_depth(x, self)? > T::zero())
    }

    /// Times `t` at which the geodesic ray from `base` to `z` is inside the
    /// horoball, as a closed interval intersected with `[0, inf)`; the upper
    /// end is infinite when `z` is the base of the horoball.
    pub fn ray_interval(&self, z: &BoundaryPoint<T>, base: &InteriorPoint<T>) -> Result<Option<(T, T)>> {
        let m = straightening_map(z, base)?;
        let h = self.to_model(Model::HalfSpace).image(&m)?;
        let (lo, hi) = match h.base {
            BoundaryPoint::Infinity { .. } => (h.size.ln(), T::infinity()),
            BoundaryPoint::Plane { z: q, .. } => {
                let e = h.size;
                let disc = e * e - T::lit(4.0) * q.norm_sqr();
                if disc < T::zero() {
                    return Ok(None);
                }
                let s = disc.sqrt();
                // smaller root computed without cancellation
                let top = (e + s) / T::two();
                let bottom = q.norm_sqr() / top;
                let lo = if bottom > T::zero() { bottom.ln() } else { T::neg_infinity() };
                (lo, top.ln())
            }
            BoundaryPoint::Sphere { .. } => unreachable!(),
        };
        let lo = lo.max(T::zero());
        if hi < lo {
            return Ok(None);
        }
        Ok(Some((lo, hi)))
    }
}

/// Hyperbolic distance from `x` to the complement of `h`, zero outside.
///
/// The base of `h` is sent to infinity by an explicit isometry; the depth is
/// then the log of the ratio of heights.
pub fn escape_depth<T: Scalar>(x: &InteriorPoint<T>, h: &Horoball<T>) -> Result<T> {
    if x.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: x.dim() });
    }
    let hs = h.to_model(Model::HalfSpace);
    let c = Mobius::sending_to_infinity(&hs.base);
    let image = hs.image(&c)?;
    let (_, height) = c.apply_interior(&x.to_half_space())?.hs_parts();
    Ok((height / image.size).ln().max(T::zero()))
}

/// Horoball with the same base and rank, shrunk by `theta`: the diameter
/// is multiplied by `theta`, or the height divided by it for a horoball
/// at infinity.
pub fn squeeze<T: Scalar>(h: &Horoball<T>, theta: T) -> Result<Horoball<T>> {
    if !(theta > T::zero() && theta <= T::one()) {
        return Err(Error::InvalidParameter(format!("squeeze factor must lie in (0, 1], got {theta}")));
    }
    let size = match h.base {
        BoundaryPoint::Infinity { .. } => h.size / theta,
        _ => h.size * theta,
    };
    Horoball::new(h.base, size, h.rank)
}

/// Spherical cap on the ball-model boundary; `radius` is chordal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Shadow<T> {
    pub center: BoundaryPoint<T>,
    pub radius: T,
}

fn normalize<T: Scalar>(v: [T; 3]) -> [T; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn dot<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn chord<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> T {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Cap of boundary points whose geodesic ray from the ball origin meets a
/// ball-model horoball: (centre direction, half-angle), half-angle pi when
/// the origin lies in the closed horoball.
fn origin_cap<T: Scalar>(h: &Horoball<T>) -> ([T; 3], T) {
    let v = h.base.sphere_vec();
    let d = h.size;
    if d >= T::one() {
        return (v, T::PI());
    }
    let half = d / T::two();
    (v, (half / (T::one() - half)).asin())
}

fn cap_points<T: Scalar>(dim: usize, c: [T; 3], alpha: T) -> Vec<[T; 3]> {
    // orthonormal frame around c
    let e1 = if dim == 1 {
        [-c[1], c[0], T::zero()]
    } else {
        let seed = if c[0].abs() < T::lit(0.9) { [T::one(), T::zero(), T::zero()] } else { [T::zero(), T::one(), T::zero()] };
        let k = dot(&seed, &c);
        normalize([seed[0] - k * c[0], seed[1] - k * c[1], seed[2] - k * c[2]])
    };
    let e2 = [c[1] * e1[2] - c[2] * e1[1], c[2] * e1[0] - c[0] * e1[2], c[0] * e1[1] - c[1] * e1[0]];
    let (ca, sa) = (alpha.cos(), alpha.sin());
    let angles: Vec<T> = if dim == 1 {
        vec![T::zero(), T::PI()]
    } else {
        (0..3).map(|i| T::two() * T::PI() * T::from_usize(i).unwrap() / T::lit(3.0)).collect()
    };
    angles
        .into_iter()
        .map(|phi| {
            let (cp, sp) = (phi.cos(), phi.sin());
            let mut p = [T::zero(); 3];
            for i in 0..3 {
                p[i] = ca * c[i] + sa * (cp * e1[i] + sp * e2[i]);
            }
            p
        })
        .collect()
}

fn sphere_point<T: Scalar>(dim: usize, v: [T; 3]) -> BoundaryPoint<T> {
    BoundaryPoint::Sphere { dim, v }
}

/// Radial projection of `h` to the boundary as seen from `base`, expressed
/// as a chordal cap in the ball model.
///
/// When `base` is not the origin the problem is moved to the origin by an
/// isometry and the resulting cap is mapped back through points of its rim.
pub fn shadow<T: Scalar>(h: &Horoball<T>, base: &InteriorPoint<T>) -> Result<Shadow<T>> {
    if base.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: base.dim() });
    }
    let dim = h.dim();
    let at_origin = base.to_ball().coords().iter().all(|&c| c.abs() <= T::UNIT_TOL);
    let (g, moved) = if at_origin {
        (Mobius::identity(dim), h.to_model(Model::Ball))
    } else {
        let g = Mobius::moving_origin_to(base).inverse();
        (g, h.image(&g)?.to_model(Model::Ball))
    };
    let (c, alpha) = origin_cap(&moved);
    if alpha >= T::PI() {
        let back = g.inverse().apply_boundary(&sphere_point(dim, c))?;
        return Ok(Shadow { center: back.to_sphere(), radius: T::two() });
    }
    if at_origin {
        let radius = T::two() * (alpha / T::two()).sin();
        return Ok(Shadow { center: sphere_point(dim, c), radius });
    }
    let gi = g.inverse();
    let map = |v: [T; 3]| -> Result<[T; 3]> { Ok(gi.apply_boundary(&sphere_point(dim, v))?.sphere_vec()) };
    let inner = map(c)?;
    let rim: Vec<[T; 3]> = cap_points(dim, c, alpha).into_iter().map(map).collect::<Result<_>>()?;
    let mut n = if dim == 1 {
        let s = [rim[0][0] + rim[1][0], rim[0][1] + rim[1][1], T::zero()];
        let len = (s[0] * s[0] + s[1] * s[1]).sqrt();
        if len <= T::lit(1e-12) {
            // rim is a diameter: centre perpendicular to it
            [-rim[0][1], rim[0][0], T::zero()]
        } else {
            normalize(s)
        }
    } else {
        let (p, q, r) = (rim[0], rim[1], rim[2]);
        let u = [q[0] - p[0], q[1] - p[1], q[2] - p[2]];
        let w = [r[0] - p[0], r[1] - p[1], r[2] - p[2]];
        normalize([u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2], u[0] * w[1] - u[1] * w[0]])
    };
    // pick the pole on the side of the mapped interior point
    if dot(&n, &inner) < dot(&n, &rim[0]) {
        n = [-n[0], -n[1], -n[2]];
    }
    let radius = chord(&n, &rim[0]);
    Ok(Shadow { center: sphere_point(dim, n), radius })
}
