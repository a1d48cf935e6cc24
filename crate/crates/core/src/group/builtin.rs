use std::collections::BTreeMap;

use num_complex::Complex64;

use super::presentation::{Generator, GroupPresentation, KnownProfile};
use crate::error::{Error, Result};
use crate::hypgeom::Mobius;

/// Numeric parameters of a built-in group, by name.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Params(BTreeMap<String, f64>);

impl Params {
    pub fn from_pairs(pairs: &[(&str, f64)]) -> Self {
        Self(pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect())
    }

    pub fn set(&mut self, key: &str, value: f64) {
        self.0.insert(key.to_string(), value);
    }

    /// Parses `key=value`.
    pub fn parse_assignment(&mut self, s: &str) -> Result<()> {
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got {s:?}")))?;
        let v: f64 = v.trim().parse().map_err(|_| Error::Parse(format!("bad number in {s:?}")))?;
        self.set(k.trim(), v);
        Ok(())
    }

    pub fn get(&self, key: &str, default: f64) -> f64 {
        self.0.get(key).copied().unwrap_or(default)
    }

    fn check_known(&self, known: &[&str]) -> Result<()> {
        for k in self.0.keys() {
            if !known.contains(&k.as_str()) {
                return Err(Error::InvalidParameter(format!("unknown parameter {k:?}; expected one of {known:?}")));
            }
        }
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &f64)> {
        self.0.iter()
    }
}

pub const BUILTIN_NAMES: [&str; 5] = ["apollonian", "schottky", "parabolic_cusp_fuchsian", "rank2_cusp", "infinite_fuchsian"];

/// Poincare exponent of the Apollonian gasket from the literature
/// (McMullen's computation, 1.305688).
pub const APOLLONIAN_DELTA: f64 = 1.305688;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Orientation reversing map `z -> M(conj z)`, stored as the matrix `M`.
#[derive(Clone, Copy, Debug)]
struct AntiMobius([Complex64; 4]);

impl AntiMobius {
    /// Reflection in the circle `|z - center| = radius`.
    fn circle(center: Complex64, radius: f64) -> Self {
        // z -> center + r^2 / (conj z - conj center)
        Self([center, c(radius * radius, 0.0) - center * center.conj(), c(1.0, 0.0), -center.conj()])
    }

    /// Reflection in the line `Re z = x`.
    fn vertical_line(x: f64) -> Self {
        Self([c(-1.0, 0.0), c(2.0 * x, 0.0), c(0.0, 0.0), c(1.0, 0.0)])
    }

    /// Matrix of `self after other`, an orientation preserving map.
    fn then(&self, other: &Self) -> [Complex64; 4] {
        let [a, b, cc, d] = self.0;
        let [e, f, g, h] = other.0.map(|z| z.conj());
        [a * e + b * g, a * f + b * h, cc * e + d * g, cc * f + d * h]
    }
}

fn mobius(dim: usize, m: [Complex64; 4]) -> Result<Mobius<f64>> {
    Mobius::new(dim, m[0], m[1], m[2], m[3])
}

/// Builds one of the catalogued groups.
///
/// * `apollonian`: the orientation preserving subgroup of the reflection
///   group in the four circles dual to the packing bounded by the lines
///   Im z = 0, Im z = 1 and the circles of radius 1/2 at i/2 and 1 + i/2.
///   Generators are products of reflections in consecutive dual circles.
/// * `schottky`: parameters `d` (1 or 2), `radius` (0.2), `separation` (1).
/// * `parabolic_cusp_fuchsian`: `z -> z + 1` and a hyperbolic pairing the
///   circles of radius `radius` (0.1) centred at -0.25 and 0.25.
/// * `rank2_cusp`: `z -> z + 1`, `z -> z + i` and a loxodromic pairing the
///   circles of radius `radius` (0.1) centred at -0.2 and 0.2.
/// * `infinite_fuchsian`: parameters `alpha` (0.2), `beta` (0.75), `n` (200).
pub fn builtin(name: &str, params: &Params) -> Result<GroupPresentation> {
    match name {
        "apollonian" => {
            params.check_known(&[])?;
            apollonian()
        }
        "schottky" => {
            params.check_known(&["d", "radius", "separation"])?;
            let d = params.get("d", 2.0);
            if d != 1.0 && d != 2.0 {
                return Err(Error::InvalidParameter(format!("schottky dimension must be 1 or 2, got {d}")));
            }
            schottky(d as usize, params.get("radius", 0.2), params.get("separation", 1.0))
        }
        "parabolic_cusp_fuchsian" => {
            params.check_known(&["radius"])?;
            parabolic_cusp_fuchsian(params.get("radius", 0.1))
        }
        "rank2_cusp" => {
            params.check_known(&["radius"])?;
            rank2_cusp(params.get("radius", 0.1))
        }
        "infinite_fuchsian" => {
            params.check_known(&["alpha", "beta", "n"])?;
            let n = params.get("n", 200.0);
            if n.fract() != 0.0 || n < 2.0 {
                return Err(Error::InvalidParameter(format!("n must be an integer >= 2, got {n}")));
            }
            infinite_fuchsian(params.get("alpha", 0.2), params.get("beta", 0.75), n as usize)
        }
        other => Err(Error::UnknownGroup(other.to_string())),
    }
}

pub fn apollonian() -> Result<GroupPresentation> {
    let r = [
        AntiMobius::vertical_line(0.0),
        AntiMobius::vertical_line(1.0),
        AntiMobius::circle(c(0.5, 0.0), 0.5),
        AntiMobius::circle(c(0.5, 1.0), 0.5),
    ];
    let gens = (0..4)
        .map(|i| {
            let m = r[i].then(&r[(i + 1) % 4]);
            Ok(Generator { label: format!("r{}r{}", i + 1, (i + 1) % 4 + 1), map: mobius(2, m)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GroupPresentation::new("apollonian", 2, gens)?.with_profile(KnownProfile {
        delta: APOLLONIAN_DELTA,
        k_min: 1,
        k_max: 1,
    }))
}

/// Map sending the outside of the circle (c1, r1) onto the inside of
/// (c2, r2): `z -> c2 - r1 r2 / (z - c1)`.
fn pairing(dim: usize, c1: Complex64, r1: f64, c2: Complex64, r2: f64) -> Result<Mobius<f64>> {
    mobius(dim, [c2, -c(r1 * r2, 0.0) - c1 * c2, c(1.0, 0.0), -c1])
}

pub fn schottky(dim: usize, radius: f64, separation: f64) -> Result<GroupPresentation> {
    if !(radius > 0.0) || !(separation > 0.0) || 2.0 * radius >= separation {
        return Err(Error::InvalidParameter(format!(
            "schottky circles must be disjoint: radius {radius}, separation {separation}"
        )));
    }
    let s = separation;
    let (p1, p2) = if dim == 1 {
        ((c(0.0, 0.0), c(2.0 * s, 0.0)), (c(s, 0.0), c(3.0 * s, 0.0)))
    } else {
        ((c(0.0, 0.0), c(s, s)), (c(s, 0.0), c(0.0, s)))
    };
    let maps = vec![pairing(dim, p1.0, radius, p1.1, radius)?, pairing(dim, p2.0, radius, p2.1, radius)?];
    GroupPresentation::from_maps("schottky", dim, maps)
}

pub fn parabolic_cusp_fuchsian(radius: f64) -> Result<GroupPresentation> {
    if !(radius > 0.0 && radius < 0.25) {
        return Err(Error::InvalidParameter(format!("radius must lie in (0, 0.25), got {radius}")));
    }
    let t = Mobius::translation(1, c(1.0, 0.0));
    let h = pairing(1, c(-0.25, 0.0), radius, c(0.25, 0.0), radius)?;
    GroupPresentation::new(
        "parabolic_cusp_fuchsian",
        1,
        vec![Generator { label: "t".into(), map: t }, Generator { label: "h".into(), map: h }],
    )
}

pub fn rank2_cusp(radius: f64) -> Result<GroupPresentation> {
    if !(radius > 0.0 && radius < 0.2) {
        return Err(Error::InvalidParameter(format!("radius must lie in (0, 0.2), got {radius}")));
    }
    let t1 = Mobius::translation(2, c(1.0, 0.0));
    let t2 = Mobius::translation(2, c(0.0, 1.0));
    let h = pairing(2, c(-0.2, 0.0), radius, c(0.2, 0.0), radius)?;
    GroupPresentation::new(
        "rank2_cusp",
        2,
        vec![
            Generator { label: "t1".into(), map: t1 },
            Generator { label: "ti".into(), map: t2 },
            Generator { label: "h".into(), map: h },
        ],
    )
}

/// Reflection circles `(x_n, r_n)`, n = 1..=count, of the infinitely
/// generated example: `x_n = n^-gamma` with `gamma = 1/beta - 1` and
/// `r_n = min(e^-n, gap_n / 4) * e^(-1/alpha)`, where `gap_n` is the
/// distance from `x_n` to its nearest neighbour among all centres.
pub fn infinite_fuchsian_circles(alpha: f64, beta: f64, count: usize) -> Result<Vec<(f64, f64)>> {
    if !(alpha > 0.0 && alpha < beta && beta < 1.0) {
        return Err(Error::InvalidParameter(format!("need 0 < alpha < beta < 1, got alpha {alpha}, beta {beta}")));
    }
    let gamma = 1.0 / beta - 1.0;
    let x = |n: usize| (n as f64).powf(-gamma);
    let shrink = (-1.0 / alpha).exp();
    Ok((1..=count)
        .map(|n| {
            let right = if n > 1 { x(n - 1) - x(n) } else { f64::INFINITY };
            let gap = right.min(x(n) - x(n + 1));
            (x(n), (-(n as f64)).exp().min(gap / 4.0) * shrink)
        })
        .collect())
}

/// Truncation of the infinitely generated example to `count` reflections.
/// Generators are `R_1 R_n` for n = 2..=count, which generate the
/// orientation preserving index 2 subgroup.
pub fn infinite_fuchsian(alpha: f64, beta: f64, count: usize) -> Result<GroupPresentation> {
    let circles = infinite_fuchsian_circles(alpha, beta, count)?;
    // unit determinant reflection matrices [[x/r, r - x^2/r], [1/r, -x/r]];
    // the products are formed without renormalizing, as their entries can be
    // far too large for a meaningful determinant
    let refl = |(x, r): (f64, f64)| [x / r, r - x * x / r, 1.0 / r, -x / r];
    let m1 = refl(circles[0]);
    let gens = circles[1..]
        .iter()
        .enumerate()
        .map(|(i, &cr)| {
            let mn = refl(cr);
            let a = m1[0] * mn[0] + m1[1] * mn[2];
            let b = m1[0] * mn[1] + m1[1] * mn[3];
            let cc = m1[2] * mn[0] + m1[3] * mn[2];
            let d = m1[2] * mn[1] + m1[3] * mn[3];
            // det(refl) = -1 for both factors, so the product has det 1
            let map = Mobius::from_unimodular(1, c(a, 0.0), c(b, 0.0), c(cc, 0.0), c(d, 0.0))?;
            Ok(Generator { label: format!("r1r{}", i + 2), map })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GroupPresentation::new("infinite_fuchsian", 1, gens)?.mark_geometrically_infinite())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypgeom::{classify, BoundaryPoint, IsometryClass};

    #[test]
    fn apollonian_generators() {
        let g = apollonian().unwrap();
        assert_eq!(g.generators().len(), 4);
        assert_eq!(g.dim(), 2);
        let p = g.known_profile().unwrap();
        assert!((p.delta - 1.305).abs() < 1e-3);
        assert_eq!((p.k_min, p.k_max), (1, 1));
        for gen in g.generators() {
            assert_eq!(classify(&gen.map).unwrap().class, IsometryClass::Parabolic);
            // Gaussian integer entries
            for e in gen.map.entries() {
                assert_eq!(e.re, e.re.round());
                assert_eq!(e.im, e.im.round());
            }
        }
        // z -> z - 2
        let first = g.generators()[0].map;
        assert_eq!(first.apply_boundary(&BoundaryPoint::complex(c(0.5, 0.5))).unwrap(), BoundaryPoint::complex(c(-1.5, 0.5)));
        // product of the four generators is the identity
        let prod = g.evaluate(&[0, 2, 4, 6]);
        assert!(prod.is_identity(1e-12));
    }

    #[test]
    fn reflections_fix_their_circles() {
        let r = AntiMobius::circle(c(0.5, 1.0), 0.5);
        for k in 0..8 {
            let th = k as f64;
            let z = c(0.5, 1.0) + c(th.cos(), th.sin()) * 0.5;
            let [a, b, cc, d] = r.0;
            let w = (a * z.conj() + b) / (cc * z.conj() + d);
            assert!((w - z).norm() < 1e-12);
        }
    }

    #[test]
    fn infinite_fuchsian_centres() {
        let circles = infinite_fuchsian_circles(0.2, 0.5, 3).unwrap();
        let xs: Vec<f64> = circles.iter().map(|c| c.0).collect();
        assert!((xs[0] - 1.0).abs() < 1e-15 && (xs[1] - 0.5).abs() < 1e-15 && (xs[2] - 1.0 / 3.0).abs() < 1e-15);
        let big = infinite_fuchsian_circles(0.2, 0.75, 200).unwrap();
        for (n, w) in big.windows(2).enumerate() {
            assert!(w[1].1 < (-(n as f64 + 2.0)).exp());
            assert!(w[0].0 - w[0].1 > w[1].0 + w[1].1, "circles overlap");
        }
        assert!(builtin("infinite_fuchsian", &Params::from_pairs(&[("alpha", 0.8), ("beta", 0.5)])).is_err());
        let g = infinite_fuchsian(0.2, 0.75, 200).unwrap();
        assert_eq!(g.generators().len(), 199);
        assert!(g.is_geometrically_infinite());
    }

    #[test]
    fn infinite_fuchsian_generators_are_reflection_products() {
        let circles = infinite_fuchsian_circles(0.5, 0.75, 5).unwrap();
        let g = infinite_fuchsian(0.5, 0.75, 5).unwrap();
        let refl = |(x, r): (f64, f64), z: f64| x + r * r / (z - x);
        for (i, gen) in g.generators().iter().enumerate() {
            let z = 0.123;
            let expect = refl(circles[0], refl(circles[i + 1], z));
            let got = match gen.map.apply_boundary(&BoundaryPoint::real(z)).unwrap() {
                BoundaryPoint::Plane { z, .. } => z.re,
                _ => panic!(),
            };
            assert!((got - expect).abs() < 1e-9 * expect.abs().max(1.0));
        }
    }

    #[test]
    fn unknown_names_and_params() {
        assert!(matches!(builtin("nope", &Params::default()), Err(Error::UnknownGroup(_))));
        assert!(builtin("schottky", &Params::from_pairs(&[("radius", 0.6)])).is_err());
        assert!(builtin("schottky", &Params::from_pairs(&[("colour", 1.0)])).is_err());
        let mut p = Params::default();
        p.parse_assignment("radius=0.05").unwrap();
        assert_eq!(p.get("radius", 0.0), 0.05);
        assert!(p.parse_assignment("radius").is_err());
    }

    #[test]
    fn schottky_maps_circles() {
        let g = schottky(2, 0.2, 1.0).unwrap();
        let m = g.generators()[0].map;
        // the circle |z| = 0.2 goes to |z - (1+i)| = 0.2
        for k in 0..6 {
            let th = k as f64;
            let z = c(th.cos(), th.sin()) * 0.2;
            let w = match m.apply_boundary(&BoundaryPoint::complex(z)).unwrap() {
                BoundaryPoint::Plane { z, .. } => z,
                _ => panic!(),
            };
            assert!(((w - c(1.0, 1.0)).norm() - 0.2).abs() < 1e-12);
        }
    }
}
