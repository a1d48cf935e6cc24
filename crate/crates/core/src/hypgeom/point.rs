use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Model of hyperbolic (d+1)-space a point is expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    /// Unit ball, base point at the origin.
    Ball,
    /// Upper half-space R^d x (0, inf), base point at (0, 1).
    HalfSpace,
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    match dim {
        1 | 2 => Ok(()),
        d => Err(Error::UnsupportedDimension(d)),
    }
}

/// Point of hyperbolic (d+1)-space.
///
/// Coordinates are stored in the first `dim + 1` slots. In the half-space
/// model the last used slot is the height.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InteriorPoint<T> {
    model: Model,
    dim: usize,
    coords: [T; 3],
}

impl<T: Scalar> InteriorPoint<T> {
    pub fn new(model: Model, dim: usize, coords: &[T]) -> Result<Self> {
        check_dim(dim)?;
        if coords.len() != dim + 1 {
            return Err(Error::InvalidPoint(format!(
                "expected {} coordinates, found {}",
                dim + 1,
                coords.len()
            )));
        }
        let mut c = [T::zero(); 3];
        c[..=dim].copy_from_slice(coords);
        if c.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidPoint("non-finite coordinate".into()));
        }
        match model {
            Model::Ball => {
                let n2 = c.iter().fold(T::zero(), |acc, &x| acc + x * x);
                if n2 >= T::one() {
                    return Err(Error::InvalidPoint("ball point must have norm < 1".into()));
                }
            }
            Model::HalfSpace => {
                if c[dim] <= T::zero() {
                    return Err(Error::InvalidPoint("half-space point must have height > 0".into()));
                }
            }
        }
        Ok(Self { model, dim, coords: c })
    }

    pub fn ball(dim: usize, coords: &[T]) -> Result<Self> {
        Self::new(Model::Ball, dim, coords)
    }

    /// Half-space point from a horizontal coordinate and a height. For d = 1
    /// the imaginary part of `z` must vanish.
    pub fn half_space(dim: usize, z: Complex<T>, h: T) -> Result<Self> {
        check_dim(dim)?;
        if dim == 1 && z.im != T::zero() {
            return Err(Error::InvalidPoint("d = 1 point must have real horizontal part".into()));
        }
        let coords = if dim == 1 { vec![z.re, h] } else { vec![z.re, z.im, h] };
        Self::new(Model::HalfSpace, dim, &coords)
    }

    /// Base point of the model: the origin of the ball, (0, 1) in half-space.
    pub fn origin(model: Model, dim: usize) -> Self {
        let mut coords = [T::zero(); 3];
        if model == Model::HalfSpace {
            coords[dim] = T::one();
        }
        Self { model, dim, coords }
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[T] {
        &self.coords[..=self.dim]
    }

    pub fn is_origin(&self) -> bool {
        *self == Self::origin(self.model, self.dim)
    }

    /// Horizontal part and height; panics-free only for half-space points.
    pub(crate) fn hs_parts(&self) -> (Complex<T>, T) {
        debug_assert_eq!(self.model, Model::HalfSpace);
        if self.dim == 1 {
            (Complex::new(self.coords[0], T::zero()), self.coords[1])
        } else {
            (Complex::new(self.coords[0], self.coords[1]), self.coords[2])
        }
    }

    pub(crate) fn from_hs_parts(dim: usize, z: Complex<T>, h: T) -> Self {
        let mut coords = [T::zero(); 3];
        coords[0] = z.re;
        if dim == 2 {
            coords[1] = z.im;
        }
        coords[dim] = h;
        Self { model: Model::HalfSpace, dim, coords }
    }

    pub(crate) fn from_raw(model: Model, dim: usize, coords: [T; 3]) -> Self {
        Self { model, dim, coords }
    }

    pub fn to_model(&self, model: Model) -> Self {
        if self.model == model {
            return *self;
        }
        let mut coords = invert_about_south(self.dim, &self.coords);
        // the inversion maps h > 0 to the open ball and back; clamp the
        // rounding residue that can push a ball point onto the sphere
        if model == Model::HalfSpace && coords[self.dim] <= T::zero() {
            coords[self.dim] = T::min_positive_value();
        }
        Self { model, dim: self.dim, coords }
    }

    pub fn to_ball(&self) -> Self {
        self.to_model(Model::Ball)
    }

    pub fn to_half_space(&self) -> Self {
        self.to_model(Model::HalfSpace)
    }

    /// Euclidean norm of the ball-model coordinates.
    pub fn ball_norm(&self) -> T {
        let b = self.to_ball();
        b.coords.iter().fold(T::zero(), |a, &x| a + x * x).sqrt()
    }
}

/// Inversion in the sphere of radius sqrt(2) centred at -e_{d+1}. It swaps
/// the upper half-space and the unit ball, sending (0, 1) to the origin.
fn invert_about_south<T: Scalar>(dim: usize, x: &[T; 3]) -> [T; 3] {
    let mut shifted = *x;
    shifted[dim] = shifted[dim] + T::one();
    let n2 = shifted[..=dim].iter().fold(T::zero(), |a, &v| a + v * v);
    let mut out = [T::zero(); 3];
    for i in 0..=dim {
        out[i] = T::two() * shifted[i] / n2;
    }
    out[dim] = out[dim] - T::one();
    out
}

/// Point on the sphere at infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryPoint<T> {
    /// Unit vector in R^{d+1} (ball model).
    Sphere { dim: usize, v: [T; 3] },
    /// Finite point of R^d, written as a complex number (d = 1: real).
    Plane { dim: usize, z: Complex<T> },
    /// The point at infinity of the half-space model.
    Infinity { dim: usize },
}

impl<T: Scalar> BoundaryPoint<T> {
    /// Sphere point; inputs within 1e-6 of unit norm are renormalized.
    pub fn sphere(dim: usize, v: &[T]) -> Result<Self> {
        check_dim(dim)?;
        if v.len() != dim + 1 {
            return Err(Error::InvalidPoint(format!(
                "expected {} coordinates, found {}",
                dim + 1,
                v.len()
            )));
        }
        let n = v.iter().fold(T::zero(), |a, &x| a + x * x).sqrt();
        if !n.is_finite() || (n - T::one()).abs() > T::lit(1e-6) {
            return Err(Error::InvalidPoint(format!("sphere point has norm {n}")));
        }
        let mut out = [T::zero(); 3];
        for (o, &x) in out.iter_mut().zip(v) {
            *o = x / n;
        }
        Ok(Self::Sphere { dim, v: out })
    }

    pub fn plane(dim: usize, z: Complex<T>) -> Result<Self> {
        check_dim(dim)?;
        if dim == 1 && z.im != T::zero() {
            return Err(Error::InvalidPoint("d = 1 boundary point must be real".into()));
        }
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::InvalidPoint("non-finite boundary point".into()));
        }
        Ok(Self::Plane { dim, z })
    }

    pub fn real(x: T) -> Self {
        Self::Plane { dim: 1, z: Complex::new(x, T::zero()) }
    }

    pub fn complex(z: Complex<T>) -> Self {
        Self::Plane { dim: 2, z }
    }

    pub fn infinity(dim: usize) -> Self {
        Self::Infinity { dim }
    }

    pub fn dim(&self) -> usize {
        match *self {
            Self::Sphere { dim, .. } | Self::Plane { dim, .. } | Self::Infinity { dim } => dim,
        }
    }

    pub fn model(&self) -> Model {
        match self {
            Self::Sphere { .. } => Model::Ball,
            _ => Model::HalfSpace,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Self::Infinity { .. })
    }

    pub fn to_sphere(&self) -> Self {
        match *self {
            Self::Sphere { .. } => *self,
            Self::Infinity { dim } => {
                let mut v = [T::zero(); 3];
                v[dim] = -T::one();
                Self::Sphere { dim, v }
            }
            Self::Plane { dim, z } => {
                let n2 = z.norm_sqr();
                let den = T::one() + n2;
                let mut v = [T::zero(); 3];
                v[0] = T::two() * z.re / den;
                if dim == 2 {
                    v[1] = T::two() * z.im / den;
                }
                v[dim] = (T::one() - n2) / den;
                Self::Sphere { dim, v }
            }
        }
    }

    pub fn to_plane(&self) -> Self {
        match *self {
            Self::Sphere { dim, v } => {
                let den = T::one() + v[dim];
                if den <= T::epsilon() * T::lit(4.0) {
                    return Self::Infinity { dim };
                }
                let z = if dim == 1 {
                    Complex::new(v[0] / den, T::zero())
                } else {
                    Complex::new(v[0] / den, v[1] / den)
                };
                Self::Plane { dim, z }
            }
            _ => *self,
        }
    }

    pub fn to_model(&self, model: Model) -> Self {
        match model {
            Model::Ball => self.to_sphere(),
            Model::HalfSpace => self.to_plane(),
        }
    }

    /// Unit vector of the ball-model representation.
    pub fn sphere_vec(&self) -> [T; 3] {
        match self.to_sphere() {
            Self::Sphere { v, .. } => v,
            _ => unreachable!(),
        }
    }

    /// Chordal (ball-model Euclidean) distance between boundary points.
    pub fn chordal_distance(&self, other: &Self) -> T {
        let a = self.sphere_vec();
        let b = other.sphere_vec();
        (0..3).fold(T::zero(), |acc, i| acc + (a[i] - b[i]) * (a[i] - b[i])).sqrt()
    }
}

/// Hyperbolic distance. Points in different models are converted to the
/// half-space model first.
pub fn hyp_distance<T: Scalar>(x: &InteriorPoint<T>, y: &InteriorPoint<T>) -> Result<T> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), found: y.dim() });
    }
    if x.model() == Model::Ball && y.model() == Model::Ball {
        // 2 asinh( |x - y| / sqrt((1-|x|^2)(1-|y|^2)) )
        let (mut d2, mut nx, mut ny) = (T::zero(), T::zero(), T::zero());
        for i in 0..=x.dim() {
            let (a, b) = (x.coords[i], y.coords[i]);
            d2 = d2 + (a - b) * (a - b);
            nx = nx + a * a;
            ny = ny + b * b;
        }
        let den = ((T::one() - nx) * (T::one() - ny)).sqrt();
        return Ok(T::two() * (d2.sqrt() / den).asinh());
    }
    let (z1, h1) = x.to_half_space().hs_parts();
    let (z2, h2) = y.to_half_space().hs_parts();
    let e2 = (z1 - z2).norm_sqr() + (h1 - h2) * (h1 - h2);
    Ok(T::two() * (e2.sqrt() / (T::two() * (h1 * h2).sqrt())).asinh())
}
