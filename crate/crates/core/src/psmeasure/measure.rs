use std::io::{BufRead, Write};
use std::path::Path;

use super::chart::CuspChart;
use crate::error::{Error, Result};
use crate::group::{write_atomic, CloudModel, PointCloud};
use crate::hypgeom::BoundaryPoint;
use crate::spatial::{dist, KdTree, P3};

/// Fixed-point scale for atom weights in mass queries.
const WEIGHT_SCALE: f64 = (1u64 << 62) as f64;

/// Finitely supported probability measure on the boundary sphere (ball
/// model) or on Euclidean space.
///
/// Near rank-one cusps the atoms of an orbit-based approximation cannot
/// resolve the measure at small scales. Such measures carry cusp charts:
/// inside a chordal ball around the cusp, masses are obtained by pushing
/// the atoms of a fundamental domain of the cusp stabilizer forward with
/// the conformal derivative, and the atoms inside the ball are ignored.
#[derive(Clone, Debug)]
pub struct EmpiricalMeasure {
    pub model: CloudModel,
    pub dim: usize,
    atoms: Vec<P3>,
    weights: Vec<f64>,
    /// Finest scale at which masses are trusted.
    pub resolution: f64,
    /// Exponent of the orbit weighting, when built from an orbit.
    pub exponent: Option<f64>,
    pub provenance: String,
    charts: Vec<CuspChart>,
    tree: KdTree,
    fixed: Vec<u64>,
    sums: Vec<u64>,
    fixed_total: u64,
    direct_share: f64,
    diameter: f64,
}

impl EmpiricalMeasure {
    /// Normalizes `weights` to total mass one.
    pub fn new(model: CloudModel, dim: usize, atoms: Vec<P3>, weights: Vec<f64>, resolution: f64) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::InvalidParameter(format!(
                "{} atoms but {} weights",
                atoms.len(),
                weights.len()
            )));
        }
        if atoms.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParameter(format!("atom weight {w} is not positive")));
        }
        // reuses the cloud checks for coordinates
        let cloud = PointCloud::new(model, dim, atoms, resolution)?;
        let total: f64 = weights.iter().sum();
        let weights: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let columns = cloud.columns();
        let diameter = cloud.diameter_bound();
        let atoms = cloud.points;
        let tree = KdTree::new(&atoms, columns);
        let mut m = Self {
            model,
            dim,
            atoms,
            weights,
            resolution,
            exponent: None,
            provenance: String::new(),
            charts: vec![],
            tree,
            fixed: vec![],
            sums: vec![],
            fixed_total: 0,
            direct_share: 1.0,
            diameter,
        };
        m.reindex();
        Ok(m)
    }

    pub fn with_provenance(mut self, p: impl Into<String>) -> Self {
        self.provenance = p.into();
        self
    }

    /// Installs cusp charts; atoms inside chart regions stop contributing
    /// to direct sums.
    pub(crate) fn with_charts(mut self, charts: Vec<CuspChart>) -> Self {
        self.charts = charts;
        self.reindex();
        self
    }

    fn reindex(&mut self) {
        let charts = &self.charts;
        self.fixed = self
            .atoms
            .iter()
            .zip(&self.weights)
            .map(|(a, w)| {
                if charts.iter().any(|c| c.covers(a)) {
                    0
                } else {
                    ((w * WEIGHT_SCALE).round() as u64).max(1)
                }
            })
            .collect();
        self.sums = self.tree.node_sums(&self.fixed);
        self.fixed_total = self.fixed.iter().sum();
        self.direct_share = self.fixed.iter().zip(&self.weights).filter(|(q, _)| **q > 0).map(|(_, w)| w).sum();
    }

    pub fn atoms(&self) -> &[P3] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Coordinates per atom.
    pub fn columns(&self) -> usize {
        match self.model {
            CloudModel::Ball => self.dim + 1,
            CloudModel::Euclidean => self.dim,
        }
    }

    /// Cusp points with a chart, as sphere vectors.
    pub fn chart_points(&self) -> Vec<P3> {
        self.charts.iter().map(|c| c.point).collect()
    }

    pub(crate) fn charts(&self) -> &[CuspChart] {
        &self.charts
    }

    /// Mass of atoms outside all chart regions, as a fraction of the total.
    pub fn direct_fraction(&self) -> f64 {
        self.direct_share
    }

    /// The atoms as a point cloud at the measure's resolution.
    pub fn support(&self) -> Result<PointCloud> {
        Ok(PointCloud::new(self.model, self.dim, self.atoms.clone(), self.resolution)?.with_provenance(self.provenance.clone()))
    }

    /// Mass of the closed ball of radius `r` about `x` (chordal distance in
    /// the ball model). Monotone in `r`; equal to 1 once `r` exceeds the
    /// diameter of the atom set.
    pub fn mass(&self, x: &P3, r: f64) -> f64 {
        if !(r > 0.0) {
            return 0.0;
        }
        if r >= self.diameter {
            return 1.0;
        }
        let direct = self.tree.sum_within(x, r, &self.fixed, &self.sums) as f64 / self.fixed_total.max(1) as f64;
        let direct = direct * self.direct_share;
        let charted: f64 = self.charts.iter().map(|c| c.mass(x, r)).sum();
        (direct + charted).clamp(0.0, 1.0)
    }

    /// Text format: header `model,d,atom_count`, then `coords..., weight`.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{},{},{}", self.model.name(), self.dim, self.len())?;
        let cols = self.columns();
        for (a, wt) in self.atoms.iter().zip(&self.weights) {
            let mut row: Vec<String> = a[..cols].iter().map(|x| format!("{x}")).collect();
            row.push(format!("{wt}"));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Reads the text format. The resolution is not stored; it is set to
    /// the smallest distance between distinct atoms.
    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty measure file".into()))??;
        let fields: Vec<&str> = header.trim().split(',').map(str::trim).collect();
        let [model, dim, count] = fields[..] else {
            return Err(Error::Parse(format!("bad measure header {header:?}; expected model,d,atom_count")));
        };
        let model = match model {
            "ball" => CloudModel::Ball,
            "euclidean" => CloudModel::Euclidean,
            m => return Err(Error::Parse(format!("unknown measure model {m:?}"))),
        };
        let dim: usize = dim.parse().map_err(|_| Error::Parse(format!("bad dimension {dim:?}")))?;
        let count: usize = count.parse().map_err(|_| Error::Parse(format!("bad atom count {count:?}")))?;
        let cols = match model {
            CloudModel::Ball => dim + 1,
            CloudModel::Euclidean => dim,
        };
        let mut atoms = vec![];
        let mut weights = vec![];
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let vals: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Parse(format!("bad number on row {}", i + 2)))?;
            if vals.len() != cols + 1 {
                return Err(Error::Parse(format!("row {} has {} columns, expected {}", i + 2, vals.len(), cols + 1)));
            }
            let mut p = [0.0; 3];
            p[..cols].copy_from_slice(&vals[..cols]);
            atoms.push(p);
            weights.push(vals[cols]);
        }
        if atoms.len() != count {
            return Err(Error::Parse(format!("header declares {count} atoms, file has {}", atoms.len())));
        }
        let resolution = min_separation(&atoms, cols);
        Self::new(model, dim, atoms, weights, resolution)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.write_to(&mut buf)?;
        write_atomic(path, &buf)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(f))
    }
}

fn min_separation(atoms: &[P3], cols: usize) -> f64 {
    let tree = KdTree::new(atoms, cols);
    let mut best = f64::INFINITY;
    for (i, a) in atoms.iter().enumerate() {
        // nearest other atom: search a growing radius
        let mut r = 1e-9;
        while r < 4.0 {
            let mut found = f64::INFINITY;
            tree.within(a, r, |j| {
                if j != i {
                    let d = dist(a, &atoms[j]);
                    if d > 0.0 {
                        found = found.min(d);
                    }
                }
            });
            if found.is_finite() {
                best = best.min(found);
                break;
            }
            r *= 8.0;
        }
    }
    if best.is_finite() {
        best
    } else {
        1.0
    }
}

/// Mass of the ball of radius `r` about a boundary point (ball-model
/// measures) in the chordal metric.
pub fn ball_mass(mu: &EmpiricalMeasure, x: &BoundaryPoint<f64>, r: f64) -> Result<f64> {
    if mu.model != CloudModel::Ball {
        return Err(Error::ModelMismatch("boundary points need a ball-model measure".into()));
    }
    if x.dim() != mu.dim {
        return Err(Error::DimensionMismatch { expected: mu.dim, found: x.dim() });
    }
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {r}")));
    }
    Ok(mu.mass(&x.sphere_vec(), r))
}
