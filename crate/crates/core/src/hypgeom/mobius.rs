use std::ops::Mul;

use num_complex::Complex;

use super::point::{check_dim, BoundaryPoint, InteriorPoint, Model};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Orientation preserving isometry of hyperbolic (d+1)-space, stored as a
/// unit determinant matrix acting on the half-space model.
///
/// For `dim == 1` all entries are real and the map preserves the upper
/// half-plane. Matrices are kept in a canonical sign so that `M` and `-M`
/// have one representative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mobius<T> {
    dim: usize,
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
    d: Complex<T>,
}

fn re<T: Scalar>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

impl<T: Scalar> Mobius<T> {
    /// Builds a map from an invertible matrix, dividing by a square root of
    /// the determinant.
    pub fn new(dim: usize, a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Result<Self> {
        check_dim(dim)?;
        let entries = [a, b, c, d];
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidMap("non-finite matrix entry".into()));
        }
        let scale = entries.iter().fold(T::zero(), |m, z| m.max(z.norm()));
        let det = a * d - b * c;
        if scale == T::zero() || det.norm() <= T::epsilon() * scale * scale {
            return Err(Error::InvalidMap("singular matrix".into()));
        }
        let root = if dim == 1 {
            let tol = T::UNIT_TOL * scale;
            if entries.iter().any(|z| z.im.abs() > tol) {
                return Err(Error::InvalidMap("d = 1 maps must have real entries".into()));
            }
            let det = a.re * d.re - b.re * c.re;
            if det <= T::zero() {
                return Err(Error::InvalidMap("d = 1 maps must have positive determinant".into()));
            }
            re(det.sqrt())
        } else {
            det.sqrt()
        };
        let strip = |z: Complex<T>| if dim == 1 { re(z.re) } else { z };
        let m = Self { dim, a: strip(a / root), b: strip(b / root), c: strip(c / root), d: strip(d / root) };
        Ok(m.canonical())
    }

    pub fn from_real(a: T, b: T, c: T, d: T) -> Result<Self> {
        Self::new(1, re(a), re(b), re(c), re(d))
    }

    pub fn from_complex(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Result<Self> {
        Self::new(2, a, b, c, d)
    }

    pub fn identity(dim: usize) -> Self {
        let (o, z) = (re(T::one()), re(T::zero()));
        Self { dim, a: o, b: z, c: z, d: o }
    }

    /// Translation z -> z + v; for d = 1 only the real part of `v` is used.
    pub fn translation(dim: usize, v: Complex<T>) -> Self {
        let mut m = Self::identity(dim);
        m.b = if dim == 1 { re(v.re) } else { v };
        m
    }

    /// Map sending `p` to infinity; identity when `p` is already infinity.
    pub fn sending_to_infinity(p: &BoundaryPoint<T>) -> Self {
        match p.to_plane() {
            BoundaryPoint::Plane { dim, z } => Self {
                dim,
                a: re(T::zero()),
                b: re(-T::one()),
                c: re(T::one()),
                d: -z,
            }
            .canonical(),
            BoundaryPoint::Infinity { dim } => Self::identity(dim),
            BoundaryPoint::Sphere { .. } => unreachable!(),
        }
    }

    /// Map taking the base point (0, 1) of the half-space to `x`.
    pub fn moving_origin_to(x: &InteriorPoint<T>) -> Self {
        let (z, h) = x.to_half_space().hs_parts();
        let s = h.sqrt();
        Self { dim: x.dim(), a: re(s), b: z / s, c: re(T::zero()), d: re(T::one() / s) }.canonical()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> [Complex<T>; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> Complex<T> {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex<T> {
        self.a + self.d
    }

    pub fn inverse(&self) -> Self {
        Self { dim: self.dim, a: self.d, b: -self.b, c: -self.c, d: self.a }.canonical()
    }

    /// `self * other` acts as `self` after `other`.
    pub fn compose(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
        .canonical()
    }

    /// `h * self * h^-1`.
    pub fn conjugate_by(&self, h: &Self) -> Self {
        h.compose(self).compose(&h.inverse())
    }

    pub fn checked_compose(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(self.compose(other))
    }

    /// Flips the global sign so that the first significant real component
    /// (in the order a.re, a.im, b.re, ...) is positive.
    fn canonical(self) -> Self {
        let comps = [
            self.a.re, self.a.im, self.b.re, self.b.im, self.c.re, self.c.im, self.d.re, self.d.im,
        ];
        let scale = comps.iter().fold(T::zero(), |m, x| m.max(x.abs()));
        let tol = scale * T::lit(1e-6);
        let first = comps.iter().copied().find(|x| x.abs() > tol).unwrap_or(T::one());
        if first < T::zero() {
            Self { dim: self.dim, a: -self.a, b: -self.b, c: -self.c, d: -self.d }
        } else {
            self
        }
    }

    /// Sum of squared moduli of the entries; equals 2 cosh d(o, g o).
    pub fn frobenius_sq(&self) -> T {
        self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr()
    }

    /// Hyperbolic distance from the base point to its image.
    pub fn origin_distance(&self) -> T {
        // cosh d - 1 = (|a - conj d|^2 + |b + conj c|^2) / 2, free of cancellation
        let q = (self.a - self.d.conj()).norm_sqr() + (self.b + self.c.conj()).norm_sqr();
        T::two() * (q.sqrt() / T::two()).asinh()
    }

    /// True when the map is +-identity up to `tol` in every entry.
    pub fn is_identity(&self, tol: T) -> bool {
        let one = re(T::one());
        self.b.norm() <= tol
            && self.c.norm() <= tol
            && (((self.a - one).norm() <= tol && (self.d - one).norm() <= tol)
                || ((self.a + one).norm() <= tol && (self.d + one).norm() <= tol))
    }

    /// Largest entrywise difference between canonical forms.
    pub fn max_entry_diff(&self, other: &Self) -> T {
        let (x, y) = (self.entries(), other.entries());
        (0..4).fold(T::zero(), |m, i| m.max((x[i] - y[i]).norm()))
    }

    fn check_point_dim(&self, dim: usize) -> Result<()> {
        if dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: dim });
        }
        Ok(())
    }

    fn apply_hs(&self, z: Complex<T>, h: T) -> (Complex<T>, T) {
        let czd = self.c * z + self.d;
        let den = czd.norm_sqr() + self.c.norm_sqr() * h * h;
        let num = (self.a * z + self.b) * czd.conj() + self.a * self.c.conj() * h * h;
        let mut w = num / den;
        if self.dim == 1 {
            w.im = T::zero();
        }
        (w, h / den)
    }

    /// Image of an interior point, returned in the model of the input.
    pub fn apply_interior(&self, x: &InteriorPoint<T>) -> Result<InteriorPoint<T>> {
        self.check_point_dim(x.dim())?;
        let (z, h) = x.to_half_space().hs_parts();
        let (w, k) = self.apply_hs(z, h);
        let y = InteriorPoint::from_hs_parts(self.dim, w, k);
        Ok(y.to_model(x.model()))
    }

    /// Image of a boundary point, returned in the model of the input.
    pub fn apply_boundary(&self, p: &BoundaryPoint<T>) -> Result<BoundaryPoint<T>> {
        self.check_point_dim(p.dim())?;
        let out = match p.to_plane() {
            BoundaryPoint::Infinity { dim } => {
                if self.c == re(T::zero()) {
                    BoundaryPoint::Infinity { dim }
                } else {
                    BoundaryPoint::Plane { dim, z: self.a / self.c }
                }
            }
            BoundaryPoint::Plane { dim, z } => {
                let den = self.c * z + self.d;
                if den == re(T::zero()) {
                    BoundaryPoint::Infinity { dim }
                } else {
                    let mut w = (self.a * z + self.b) / den;
                    if dim == 1 {
                        w.im = T::zero();
                    }
                    if !w.re.is_finite() || !w.im.is_finite() {
                        BoundaryPoint::Infinity { dim }
                    } else {
                        BoundaryPoint::Plane { dim, z: w }
                    }
                }
            }
            BoundaryPoint::Sphere { .. } => unreachable!(),
        };
        Ok(out.to_model(p.model()))
    }

    /// Image of the base point of `model`.
    pub fn orbit_point(&self, model: Model) -> InteriorPoint<T> {
        let (w, k) = self.apply_hs(re(T::zero()), T::one());
        InteriorPoint::from_hs_parts(self.dim, w, k).to_model(model)
    }

    /// Ball-model coordinates of the image of the base point, computed
    /// directly from the entries; safe for entries near the overflow range.
    pub fn orbit_point_ball(&self) -> [T; 3] {
        // g(j) = (z, h) with z = (a conj(c) + b conj(d)) / n, h = 1 / n,
        // n = |c|^2 + |d|^2
        let n = self.c.norm_sqr() + self.d.norm_sqr();
        let z = self.a * (self.c.conj() / n) + self.b * (self.d.conj() / n);
        let h = T::one() / n;
        let z2 = z.norm_sqr();
        let den = z2 + (T::one() + h) * (T::one() + h);
        let mut out = [T::zero(); 3];
        out[0] = T::two() * z.re / den;
        if self.dim == 2 {
            out[1] = T::two() * z.im / den;
        }
        out[self.dim] = (T::one() - z2 - h * h) / den;
        out
    }

    /// Builds a map from entries already known to have determinant one,
    /// skipping renormalization. Used when the entries are so large that
    /// the computed determinant is meaningless.
    pub fn from_unimodular(dim: usize, a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Result<Self> {
        check_dim(dim)?;
        if [a, b, c, d].iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidMap("non-finite matrix entry".into()));
        }
        let strip = |z: Complex<T>| if dim == 1 { re(z.re) } else { z };
        Ok(Self { dim, a: strip(a), b: strip(b), c: strip(c), d: strip(d) }.canonical())
    }
}

impl<T: Scalar> Mul for Mobius<T> {
    type Output = Mobius<T>;
    fn mul(self, rhs: Self) -> Self {
        self.compose(&rhs)
    }
}

impl<'a, T: Scalar> Mul<&'a Mobius<T>> for &'a Mobius<T> {
    type Output = Mobius<T>;
    fn mul(self, rhs: &Mobius<T>) -> Mobius<T> {
        self.compose(rhs)
    }
}

/// Isometry type of a map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IsometryClass {
    Identity,
    Elliptic,
    Parabolic,
    HyperbolicLoxodromic,
}

/// Result of [`classify`]: the class and the boundary fixed points
/// (attracting point first for hyperbolic/loxodromic maps).
#[derive(Clone, Debug, PartialEq)]
pub struct Classification<T> {
    pub class: IsometryClass,
    pub fixed_points: Vec<BoundaryPoint<T>>,
}

fn boundary<T: Scalar>(dim: usize, z: Complex<T>) -> BoundaryPoint<T> {
    let z = if dim == 1 { re(z.re) } else { z };
    BoundaryPoint::Plane { dim, z }
}

/// Classifies a map by its trace. Values of |tr^2 - 4| strictly between the
/// parabolic tolerance and ten times it are reported as ambiguous.
pub fn classify<T: Scalar>(g: &Mobius<T>) -> Result<Classification<T>> {
    let dim = g.dim;
    if g.is_identity(T::PARABOLIC_TOL) {
        return Ok(Classification { class: IsometryClass::Identity, fixed_points: vec![] });
    }
    let tr = g.trace();
    let four = re(T::lit(4.0));
    let dev = (tr * tr - four).norm();
    if dev > T::PARABOLIC_TOL && dev <= T::AMBIGUOUS_TOL {
        return Err(Error::AmbiguousClass { deviation: dev.to_f64().unwrap_or(f64::NAN) });
    }
    let scale = g.frobenius_sq().sqrt();
    let c_zero = g.c.norm() <= T::UNIT_TOL * scale;
    if dev <= T::PARABOLIC_TOL {
        let p = if c_zero {
            BoundaryPoint::Infinity { dim }
        } else {
            boundary(dim, (g.a - g.d) / (g.c * T::two()))
        };
        return Ok(Classification { class: IsometryClass::Parabolic, fixed_points: vec![p] });
    }
    let elliptic = tr.im.abs() <= T::PARABOLIC_TOL && tr.re.abs() < T::two();
    let class = if elliptic { IsometryClass::Elliptic } else { IsometryClass::HyperbolicLoxodromic };
    if dim == 1 && elliptic {
        // the fixed points lie off the real line; no boundary fixed points
        return Ok(Classification { class, fixed_points: vec![] });
    }
    let mut pts: Vec<(BoundaryPoint<T>, T)> = if c_zero {
        let inf = BoundaryPoint::Infinity { dim };
        let fin = boundary(dim, g.b / (g.d - g.a));
        // multipliers: d/a at infinity, a/d at the finite point
        vec![(inf, (g.d / g.a).norm()), (fin, (g.a / g.d).norm())]
    } else {
        let disc = (tr * tr - four).sqrt();
        [T::one(), -T::one()]
            .iter()
            .map(|&s| {
                let z = (g.a - g.d + disc * s) / (g.c * T::two());
                let mult = T::one() / (g.c * z + g.d).norm_sqr();
                (boundary(dim, z), mult)
            })
            .collect()
    };
    pts.sort_by(|x, y| x.1.partial_cmp(&y.1).unwrap_or(std::cmp::Ordering::Equal));
    Ok(Classification { class, fixed_points: pts.into_iter().map(|p| p.0).collect() })
}
