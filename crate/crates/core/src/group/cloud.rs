use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::spatial::P3;

/// Coordinates of a cloud: unit vectors in R^{d+1} (ball model boundary)
/// or plain points of R^d.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CloudModel {
    Ball,
    Euclidean,
}

impl CloudModel {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Ball => "ball",
            Self::Euclidean => "euclidean",
        }
    }
}

/// Finite sample of a limit set (or any compact set) with a declared
/// resolution: every point of the set lies within `resolution` of a sample.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    pub model: CloudModel,
    pub dim: usize,
    pub points: Vec<P3>,
    pub resolution: f64,
    pub provenance: String,
}

impl PointCloud {
    pub fn new(model: CloudModel, dim: usize, points: Vec<P3>, resolution: f64) -> Result<Self> {
        let max_dim = if model == CloudModel::Ball { 2 } else { 3 };
        if dim == 0 || dim > max_dim {
            return Err(Error::UnsupportedDimension(dim));
        }
        if !(resolution > 0.0) || !resolution.is_finite() {
            return Err(Error::InvalidParameter(format!("resolution must be positive, got {resolution}")));
        }
        let cols = Self::columns_for(model, dim);
        for p in &points {
            if p.iter().any(|x| !x.is_finite()) || p[cols..].iter().any(|&x| x != 0.0) {
                return Err(Error::InvalidPoint(format!("bad cloud point {p:?}")));
            }
            if model == CloudModel::Ball {
                let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
                if (n - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidPoint(format!("ball cloud point has norm {n}")));
                }
            }
        }
        Ok(Self { model, dim, points, resolution, provenance: String::new() })
    }

    pub fn with_provenance(mut self, p: impl Into<String>) -> Self {
        self.provenance = p.into();
        self
    }

    fn columns_for(model: CloudModel, dim: usize) -> usize {
        match model {
            CloudModel::Ball => dim + 1,
            CloudModel::Euclidean => dim,
        }
    }

    /// Number of coordinates per point.
    pub fn columns(&self) -> usize {
        Self::columns_for(self.model, self.dim)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest distance between points of the bounding box.
    pub fn diameter_bound(&self) -> f64 {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in &self.points {
            for a in 0..3 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        (0..3).map(|a| (hi[a] - lo[a]).max(0.0).powi(2)).sum::<f64>().sqrt()
    }

    /// Writes the text format: header `model,d,resolution`, then one row of
    /// comma-separated coordinates per point.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{},{},{}", self.model.name(), self.dim, self.resolution)?;
        let cols = self.columns();
        for p in &self.points {
            let row: Vec<String> = p[..cols].iter().map(|x| format!("{x}")).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty cloud file".into()))??;
        let fields: Vec<&str> = header.trim().split(',').map(str::trim).collect();
        let [model, dim, res] = fields[..] else {
            return Err(Error::Parse(format!("bad cloud header {header:?}; expected model,d,resolution")));
        };
        let model = match model {
            "ball" => CloudModel::Ball,
            "euclidean" => CloudModel::Euclidean,
            m => return Err(Error::Parse(format!("unknown cloud model {m:?}"))),
        };
        let dim: usize = dim.parse().map_err(|_| Error::Parse(format!("bad dimension {dim:?}")))?;
        let resolution: f64 = res.parse().map_err(|_| Error::Parse(format!("bad resolution {res:?}")))?;
        let cols = Self::columns_for(model, dim);
        let mut points = vec![];
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
            if vals.len() != cols {
                return Err(Error::Parse(format!("row {} has {} columns, expected {cols}", i + 2, vals.len())));
            }
            let mut p = [0.0; 3];
            p[..cols].copy_from_slice(&vals);
            points.push(p);
        }
        Self::new(model, dim, points, resolution)
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

/// Writes `bytes` to a temporary file next to `path` and renames it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| Error::InvalidParameter(format!("bad output path {path:?}")))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path).inspect_err(|_| {
        let _ = std::fs::remove_file(&tmp);
    })?;
    Ok(())
}
