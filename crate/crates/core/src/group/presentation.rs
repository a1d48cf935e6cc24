use crate::error::{Error, Result};
use crate::hypgeom::{Mobius, Model};

/// Literature values attached to a group.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KnownProfile {
    pub delta: f64,
    pub k_min: usize,
    pub k_max: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub label: String,
    pub map: Mobius<f64>,
}

/// Finite generating set of a discrete group acting on hyperbolic
/// (d+1)-space. Inverses are implicit.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupPresentation {
    name: String,
    dim: usize,
    model: Model,
    generators: Vec<Generator>,
    known_profile: Option<KnownProfile>,
    geometrically_infinite: bool,
}

/// Index into the letter alphabet: generator `i` is letter `2i`, its
/// inverse letter `2i + 1`.
pub type Letter = u32;

pub fn inverse_letter(l: Letter) -> Letter {
    l ^ 1
}

impl GroupPresentation {
    pub fn new(name: impl Into<String>, dim: usize, generators: Vec<Generator>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidParameter("generator list is empty".into()));
        }
        for g in &generators {
            if g.map.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: g.map.dim() });
            }
            if g.map.is_identity(1e-12) {
                return Err(Error::InvalidParameter(format!("generator {} is the identity", g.label)));
            }
        }
        Ok(Self {
            name: name.into(),
            dim,
            model: Model::HalfSpace,
            generators,
            known_profile: None,
            geometrically_infinite: false,
        })
    }

    /// Convenience constructor labelling generators `g1, g2, ...`.
    pub fn from_maps(name: impl Into<String>, dim: usize, maps: Vec<Mobius<f64>>) -> Result<Self> {
        let gens = maps
            .into_iter()
            .enumerate()
            .map(|(i, map)| Generator { label: format!("g{}", i + 1), map })
            .collect();
        Self::new(name, dim, gens)
    }

    pub fn with_profile(mut self, p: KnownProfile) -> Self {
        self.known_profile = Some(p);
        self
    }

    pub fn with_model(mut self, model: Model) -> Self {
        self.model = model;
        self
    }

    pub fn mark_geometrically_infinite(mut self) -> Self {
        self.geometrically_infinite = true;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Model the presentation was given in; maps are always stored in the
    /// half-space model.
    pub fn model(&self) -> Model {
        self.model
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn known_profile(&self) -> Option<KnownProfile> {
        self.known_profile
    }

    pub fn is_geometrically_infinite(&self) -> bool {
        self.geometrically_infinite
    }

    pub fn letter_count(&self) -> usize {
        2 * self.generators.len()
    }

    pub fn letter_map(&self, l: Letter) -> Mobius<f64> {
        let g = &self.generators[(l / 2) as usize].map;
        if l.is_multiple_of(2) {
            *g
        } else {
            g.inverse()
        }
    }

    pub fn letter_label(&self, l: Letter) -> String {
        let g = &self.generators[(l / 2) as usize].label;
        if l.is_multiple_of(2) {
            g.clone()
        } else {
            format!("{g}^-1")
        }
    }

    pub fn word_string(&self, word: &[Letter]) -> String {
        if word.is_empty() {
            return "e".into();
        }
        word.iter().map(|&l| self.letter_label(l)).collect::<Vec<_>>().join(" ")
    }

    /// Product of the letters of a word, leftmost letter applied last.
    pub fn evaluate(&self, word: &[Letter]) -> Mobius<f64> {
        word.iter().fold(Mobius::identity(self.dim), |acc, &l| acc.compose(&self.letter_map(l)))
    }

    /// Presentation conjugated by `h`: every generator `g` becomes `h g h^-1`.
    pub fn conjugated(&self, h: &Mobius<f64>) -> Result<Self> {
        let gens = self
            .generators
            .iter()
            .map(|g| Generator { label: g.label.clone(), map: g.map.conjugate_by(h) })
            .collect();
        let mut out = Self::new(format!("{}^h", self.name), self.dim, gens)?;
        out.known_profile = self.known_profile;
        out.geometrically_infinite = self.geometrically_infinite;
        Ok(out)
    }
}
