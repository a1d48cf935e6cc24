use crate::error::{Error, Result};
use crate::spatial::P3;

/// Center and scale pair at which an extremal local exponent was attained.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub center_index: usize,
    pub center: P3,
    pub big: f64,
    pub small: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DimensionEstimate {
    pub value: f64,
    pub method: String,
    pub scale_range: (f64, f64),
    pub witness: Option<Witness>,
    /// Named fit diagnostics (residuals, spreads, cross-checks).
    pub diagnostics: Vec<(String, f64)>,
}

impl DimensionEstimate {
    pub fn diagnostic(&self, name: &str) -> Option<f64> {
        self.diagnostics.iter().find(|(n, _)| n == name).map(|d| d.1)
    }
}

/// Geometric grid of `count` scales from `r_min` to `r_max` inclusive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaleGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub count: usize,
}

impl ScaleGrid {
    pub fn new(r_min: f64, r_max: f64, count: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) || count < 2 {
            return Err(Error::InvalidParameter(format!("bad scale grid {r_min}:{r_max}:{count}")));
        }
        Ok(Self { r_min, r_max, count })
    }

    /// Parses `R_MIN:R_MAX:COUNT`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Parse(format!("bad scale grid {s:?}; expected R_MIN:R_MAX:COUNT"));
        let [a, b, c] = parts[..] else { return Err(bad()) };
        let r_min = a.trim().parse().map_err(|_| bad())?;
        let r_max = b.trim().parse().map_err(|_| bad())?;
        let count = c.trim().parse().map_err(|_| bad())?;
        Self::new(r_min, r_max, count)
    }

    pub fn scales(&self) -> Vec<f64> {
        let q = (self.r_max / self.r_min).ln() / (self.count - 1) as f64;
        (0..self.count).map(|i| if i + 1 == self.count { self.r_max } else { self.r_min * (q * i as f64).exp() }).collect()
    }

    /// The same grid with every scale multiplied by `f`.
    pub fn scaled(&self, f: f64) -> Self {
        Self { r_min: self.r_min * f, r_max: self.r_max * f, count: self.count }
    }
}

/// Least-squares line through `(x, y)`: (slope, intercept, rms residual).
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let icpt = my - slope * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - icpt - slope * x).powi(2)).sum();
    (slope, icpt, (rss / n).sqrt())
}
