use num_complex::Complex;

use super::mobius::Mobius;
use super::point::{BoundaryPoint, InteriorPoint, Model};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Isometry `M` with `M(base) = (0, 1)` and `M(z) = infinity`; the ray from
/// `base` to `z` becomes the vertical ray `(0, e^t)`.
pub fn straightening_map<T: Scalar>(z: &BoundaryPoint<T>, base: &InteriorPoint<T>) -> Result<Mobius<T>> {
    if z.dim() != base.dim() {
        return Err(Error::DimensionMismatch { expected: base.dim(), found: z.dim() });
    }
    let a_inv = Mobius::moving_origin_to(base).inverse();
    let w = a_inv.apply_boundary(&z.to_plane())?;
    let u = match w {
        BoundaryPoint::Plane { dim, z: w } => {
            let s = (T::one() + w.norm_sqr()).sqrt();
            let one = Complex::new(T::one() / s, T::zero());
            Mobius::new(dim, w / s, -one, one, w.conj() / s)?
        }
        _ => Mobius::identity(z.dim()),
    };
    Ok(u.inverse().compose(&a_inv))
}

/// Point at hyperbolic distance `t` from `base` on the geodesic ray towards
/// `z`, in the model of `base`.
pub fn geodesic_point<T: Scalar>(z: &BoundaryPoint<T>, t: T, base: &InteriorPoint<T>) -> Result<InteriorPoint<T>> {
    if z.dim() != base.dim() {
        return Err(Error::DimensionMismatch { expected: base.dim(), found: z.dim() });
    }
    if t.is_nan() || t < T::zero() {
        return Err(Error::InvalidParameter(format!("geodesic time must be >= 0, got {t}")));
    }
    let dim = base.dim();
    if base.model() == Model::Ball && base.is_origin() {
        let v = z.sphere_vec();
        let r = (t / T::two()).tanh();
        let mut c = [T::zero(); 3];
        for i in 0..=dim {
            c[i] = r * v[i];
        }
        return Ok(InteriorPoint::from_raw(Model::Ball, dim, c));
    }
    let m = straightening_map(z, base)?;
    let p = InteriorPoint::from_hs_parts(dim, Complex::new(T::zero(), T::zero()), t.exp());
    let out = m.inverse().apply_interior(&p)?;
    Ok(out.to_model(base.model()))
}

/// Geodesic point from the model origin.
pub fn geodesic_point_from_origin<T: Scalar>(z: &BoundaryPoint<T>, t: T, model: Model) -> Result<InteriorPoint<T>> {
    geodesic_point(z, t, &InteriorPoint::origin(model, z.dim()))
}
