//! Group configuration files.
//!
//! ```toml
//! name = "example"          # optional
//! model = "halfspace"       # or "ball" (d = 1 only)
//! d = 1
//!
//! [[generators]]
//! label = "t"
//! matrix = [[1, 1], [0, 1]] # rows; complex entries as [re, im]
//!
//! [known_profile]           # optional
//! delta = 0.6
//! k_min = 1
//! k_max = 1
//! ```

use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use super::presentation::{Generator, GroupPresentation, KnownProfile};
use crate::error::{Error, Result};
use crate::hypgeom::{Mobius, Model};

#[derive(Deserialize)]
#[serde(untagged)]
enum RawEntry {
    Real(f64),
    Complex([f64; 2]),
}

impl RawEntry {
    fn value(&self) -> Complex64 {
        match *self {
            Self::Real(x) => Complex64::new(x, 0.0),
            Self::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGenerator {
    label: Option<String>,
    matrix: [[RawEntry; 2]; 2],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    delta: f64,
    k_min: usize,
    k_max: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: Option<String>,
    model: String,
    d: usize,
    generators: Vec<RawGenerator>,
    known_profile: Option<RawProfile>,
}

/// Converts a map of the unit disc, given by its matrix, to the half-space
/// model used internally. The disc-to-half-plane correspondence is
/// orientation reversing (`z -> K(conj z)` with `K = [[-i, 1], [1, -i]]`),
/// so the result is `conj(conj(K) B K)`.
fn disc_to_half_plane(m: [Complex64; 4]) -> [Complex64; 4] {
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    let k = [-i, one, one, -i];
    let kc = [i, one, one, i];
    let mul = |x: [Complex64; 4], y: [Complex64; 4]| {
        [x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]]
    };
    mul(mul(kc, m), k).map(|z| z.conj())
}

pub fn parse_config(text: &str) -> Result<GroupPresentation> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let model = match raw.model.as_str() {
        "halfspace" => Model::HalfSpace,
        "ball" => Model::Ball,
        other => return Err(Error::Parse(format!("unknown model {other:?}"))),
    };
    if model == Model::Ball && raw.d != 1 {
        return Err(Error::Parse("ball-model generators are supported for d = 1 only".into()));
    }
    let mut gens = Vec::with_capacity(raw.generators.len());
    for (i, g) in raw.generators.iter().enumerate() {
        let [[a, b], [c, d]] = &g.matrix;
        let mut m = [a.value(), b.value(), c.value(), d.value()];
        if model == Model::Ball {
            m = disc_to_half_plane(m);
        }
        let map = Mobius::new(raw.d, m[0], m[1], m[2], m[3])
            .map_err(|e| Error::Parse(format!("generator {}: {e}", i + 1)))?;
        let label = g.label.clone().unwrap_or_else(|| format!("g{}", i + 1));
        gens.push(Generator { label, map });
    }
    let mut out = GroupPresentation::new(raw.name.unwrap_or_else(|| "config".into()), raw.d, gens)?.with_model(model);
    if let Some(p) = raw.known_profile {
        if p.k_min > p.k_max || p.k_max > raw.d || !p.delta.is_finite() {
            return Err(Error::Parse("inconsistent known_profile".into()));
        }
        out = out.with_profile(KnownProfile { delta: p.delta, k_min: p.k_min, k_max: p.k_max });
    }
    Ok(out)
}

pub fn load_config(path: &Path) -> Result<GroupPresentation> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

/// Serializes a presentation in the configuration format (half-space model).
pub fn to_config(g: &GroupPresentation) -> String {
    let mut s = format!("name = {:?}\nmodel = \"halfspace\"\nd = {}\n", g.name(), g.dim());
    for gen in g.generators() {
        let e = gen.map.entries();
        let f = |z: Complex64| format!("[{:?}, {:?}]", z.re, z.im);
        s.push_str(&format!(
            "\n[[generators]]\nlabel = {:?}\nmatrix = [[{}, {}], [{}, {}]]\n",
            gen.label,
            f(e[0]),
            f(e[1]),
            f(e[2]),
            f(e[3])
        ));
    }
    if let Some(p) = g.known_profile() {
        s.push_str(&format!("\n[known_profile]\ndelta = {:?}\nk_min = {}\nk_max = {}\n", p.delta, p.k_min, p.k_max));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::builtin::apollonian;
    use crate::hypgeom::{BoundaryPoint, InteriorPoint};

    #[test]
    fn parses_real_and_complex_entries() {
        let g = parse_config(
            r#"
model = "halfspace"
d = 2
[[generators]]
label = "t"
matrix = [[1, [0.0, 1.0]], [0, 1]]
[known_profile]
delta = 1.2
k_min = 2
k_max = 2
"#,
        )
        .unwrap();
        assert_eq!(g.generators()[0].label, "t");
        assert_eq!(g.generators()[0].map.entries()[1], Complex64::new(0.0, 1.0));
        assert_eq!(g.known_profile().unwrap().k_max, 2);
    }

    #[test]
    fn round_trip() {
        let g = apollonian().unwrap();
        let back = parse_config(&to_config(&g)).unwrap();
        for (a, b) in g.generators().iter().zip(back.generators()) {
            assert_eq!(a.map, b.map);
            assert_eq!(a.label, b.label);
        }
        assert_eq!(g.known_profile(), back.known_profile());
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(parse_config("model = \"ball\"\nd = 2\ngenerators = []").is_err());
        assert!(parse_config("model = \"halfspace\"\nd = 1\ngenerators = []").is_err());
        assert!(parse_config("model = \"klein\"\nd = 1\ngenerators = []").is_err());
        assert!(parse_config("model = \"halfspace\"\nd = 1\n[[generators]]\nmatrix = [[0, 1], [1, 0]]").is_err());
        assert!(parse_config("not toml [").is_err());
    }

    #[test]
    fn disc_rotation_fixes_base_point() {
        // rotation of the disc by angle 2 phi: [[e^{i phi}, 0], [0, e^{-i phi}]]
        let phi: f64 = 0.4;
        let text = format!(
            "model = \"ball\"\nd = 1\n[[generators]]\nmatrix = [[[{c}, {s}], 0], [0, [{c}, {m}]]]\n",
            c = phi.cos(),
            s = phi.sin(),
            m = -phi.sin()
        );
        let g = parse_config(&text).unwrap();
        let map = g.generators()[0].map;
        let o = InteriorPoint::origin(crate::hypgeom::Model::Ball, 1);
        let img = map.apply_interior(&o).unwrap();
        assert!(img.coords().iter().all(|c| c.abs() < 1e-12));
        // a boundary point is rotated by 2 phi (up to orientation)
        let p = BoundaryPoint::sphere(1, &[1.0, 0.0]).unwrap();
        let q = map.apply_boundary(&p).unwrap().sphere_vec();
        assert!((q[0] - (2.0 * phi).cos()).abs() < 1e-12);
        assert!(((q[1]).abs() - (2.0 * phi).sin()).abs() < 1e-12);
    }
}
