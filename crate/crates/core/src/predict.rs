//! Closed-form dimensions of geometrically finite groups and their
//! Patterson-Sullivan measures.

use crate::error::{Error, Result};
use crate::group::KnownProfile;
use crate::scalar::Scalar;

/// The data the formulas depend on: Poincaré exponent, extreme cusp ranks
/// and boundary dimension.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupProfile<T> {
    pub delta: T,
    pub k_min: usize,
    pub k_max: usize,
    pub d: usize,
    pub parabolic_free: bool,
}

impl<T: Scalar> GroupProfile<T> {
    /// Profile with cusps of ranks `k_min..=k_max`.
    pub fn cusped(delta: T, k_min: usize, k_max: usize, d: usize) -> Result<Self> {
        let p = Self { delta, k_min, k_max, d, parabolic_free: false };
        p.validate()?;
        Ok(p)
    }

    pub fn parabolic_free(delta: T, d: usize) -> Result<Self> {
        let p = Self { delta, k_min: 0, k_max: 0, d, parabolic_free: true };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidProfile(m));
        if self.d < 1 {
            return bad("d must be at least 1".into());
        }
        if !(self.delta > T::zero()) || !(self.delta <= T::from_usize(self.d).unwrap()) {
            return bad(format!("delta = {} must lie in (0, d = {}]", self.delta, self.d));
        }
        if self.parabolic_free {
            if self.k_min != 0 || self.k_max != 0 {
                return bad("a parabolic-free profile has k_min = k_max = 0".into());
            }
            return Ok(());
        }
        if !(1 <= self.k_min && self.k_min <= self.k_max && self.k_max <= self.d) {
            return bad(format!("need 1 <= k_min <= k_max <= d, got {} {} {}", self.k_min, self.k_max, self.d));
        }
        if !(self.delta * T::two() > T::from_usize(self.k_max).unwrap()) {
            return bad(format!("delta = {} must exceed k_max / 2 = {}", self.delta, self.k_max as f64 / 2.0));
        }
        Ok(())
    }

    /// `(k_min + k_max) / 2`, where the regularity dimensions change slope.
    pub fn phase_transition(&self) -> T {
        T::from_usize(self.k_min + self.k_max).unwrap() / T::two()
    }
}

impl GroupProfile<f64> {
    /// Profile from a group's literature values.
    pub fn from_known(k: &KnownProfile, d: usize) -> Result<Self> {
        if k.k_max == 0 {
            Self::parabolic_free(k.delta, d)
        } else {
            Self::cusped(k.delta, k.k_min, k.k_max, d)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FuchsianCase {
    /// `0 < dim_L = dim_H = dim_A = delta < 1`.
    ParabolicFree,
    /// `1/2 < dim_L = dim_H = delta < dim_A = 1`.
    Cusped,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UniformRank {
    /// `dim_L = dim_H < dim_A` (delta < k).
    LowerIsHausdorff,
    /// `dim_L < dim_H = dim_A` (delta > k).
    HausdorffIsAssouad,
    /// `delta = k`: all three coincide.
    AllEqual,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Corollaries {
    /// `k_max = d`: full Assouad dimension, non-porous limit set.
    pub full_assouad: bool,
    /// `delta <= (k_min + k_max) / 2`.
    pub upper_reg_attains_assouad: bool,
    /// `delta >= (k_min + k_max) / 2`.
    pub lower_reg_attains_lower: bool,
    /// `k_min < k_max` and `delta = (k_min + k_max) / 2` exactly: lower,
    /// Hausdorff and Assouad dimensions distinct and realised by the measure.
    pub triple_gap: bool,
    pub fuchsian: Option<FuchsianCase>,
    pub uniform_rank: Option<UniformRank>,
}

impl Corollaries {
    /// One line per flag that holds.
    pub fn labels(&self) -> Vec<String> {
        let mut out = vec![];
        if self.full_assouad {
            out.push("full Assouad dimension (k_max = d): limit set is non-porous".to_string());
        }
        if self.upper_reg_attains_assouad {
            out.push("upper regularity dimension equals Assouad dimension".to_string());
        }
        if self.lower_reg_attains_lower {
            out.push("lower regularity dimension equals lower dimension".to_string());
        }
        if self.triple_gap {
            out.push("lower < Hausdorff < Assouad, all realised by the measure".to_string());
        }
        match self.fuchsian {
            Some(FuchsianCase::ParabolicFree) => out.push("Fuchsian, parabolic free: 0 < dim_L = dim_H = dim_A = delta < 1".to_string()),
            Some(FuchsianCase::Cusped) => out.push("Fuchsian, cusped: dim_A = 1 and 1/2 < dim_L = dim_H = delta < 1".to_string()),
            None => {}
        }
        match self.uniform_rank {
            Some(UniformRank::LowerIsHausdorff) => out.push("uniform rank: dim_L = dim_H < dim_A".to_string()),
            Some(UniformRank::HausdorffIsAssouad) => out.push("uniform rank: dim_L < dim_H = dim_A".to_string()),
            Some(UniformRank::AllEqual) => out.push("uniform rank with delta = k: dim_L = dim_H = dim_A".to_string()),
            None => {}
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DimensionReport<T> {
    pub dim_h: T,
    pub dim_a: T,
    pub dim_l: T,
    pub upper_reg: T,
    pub lower_reg: T,
    pub sup_upper_loc: T,
    pub inf_lower_loc: T,
    pub corollaries: Corollaries,
}

fn max<T: Scalar>(a: T, b: T) -> T {
    if a >= b {
        a
    } else {
        b
    }
}

fn min<T: Scalar>(a: T, b: T) -> T {
    if a <= b {
        a
    } else {
        b
    }
}

/// Every dimension of the limit set and the Patterson-Sullivan measure.
pub fn predict_dims<T: Scalar>(p: &GroupProfile<T>) -> Result<DimensionReport<T>> {
    p.validate()?;
    let delta = p.delta;
    let corollaries = classify_corollaries(p)?;
    if p.parabolic_free {
        return Ok(DimensionReport {
            dim_h: delta,
            dim_a: delta,
            dim_l: delta,
            upper_reg: delta,
            lower_reg: delta,
            sup_upper_loc: delta,
            inf_lower_loc: delta,
            corollaries,
        });
    }
    let kmin = T::from_usize(p.k_min).unwrap();
    let kmax = T::from_usize(p.k_max).unwrap();
    let twice = delta * T::two();
    Ok(DimensionReport {
        dim_h: delta,
        dim_a: max(kmax, delta),
        dim_l: min(kmin, delta),
        upper_reg: max(kmax, twice - kmin),
        lower_reg: min(kmin, twice - kmax),
        sup_upper_loc: max(delta, twice - kmin),
        inf_lower_loc: min(delta, twice - kmax),
        corollaries,
    })
}

/// Corollary flags. Comparisons with the phase transition are exact.
pub fn classify_corollaries<T: Scalar>(p: &GroupProfile<T>) -> Result<Corollaries> {
    p.validate()?;
    let mut c = Corollaries::default();
    if p.d == 1 {
        c.fuchsian = Some(if p.parabolic_free { FuchsianCase::ParabolicFree } else { FuchsianCase::Cusped });
    }
    if p.parabolic_free {
        c.upper_reg_attains_assouad = true;
        c.lower_reg_attains_lower = true;
        return Ok(c);
    }
    // delta * 2 is exact, so compare it with the integer k_min + k_max
    let twice = p.delta * T::two();
    let sum = T::from_usize(p.k_min + p.k_max).unwrap();
    c.full_assouad = p.k_max == p.d;
    c.upper_reg_attains_assouad = twice <= sum;
    c.lower_reg_attains_lower = twice >= sum;
    c.triple_gap = p.k_min < p.k_max && twice == sum;
    if p.k_min == p.k_max {
        let k = T::from_usize(p.k_min).unwrap();
        c.uniform_rank = Some(if p.delta < k {
            UniformRank::LowerIsHausdorff
        } else if p.delta > k {
            UniformRank::HausdorffIsAssouad
        } else {
            UniformRank::AllEqual
        });
    }
    Ok(c)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseRow<T> {
    pub delta: T,
    pub upper_reg: T,
    pub lower_reg: T,
    pub dim_a: T,
    pub dim_l: T,
    pub poincare: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseTable<T> {
    pub k_min: usize,
    pub k_max: usize,
    pub d: usize,
    pub rows: Vec<PhaseRow<T>>,
}

pub const PHASE_HEADER: &str = "delta,upper_reg,lower_reg,dim_A,dim_L,poincare";

/// The three panels of the standard phase plot: `(k_min, k_max, d)`.
pub const FIGURE_PANELS: [(usize, usize, usize); 3] = [(1, 3, 4), (3, 5, 6), (1, 1, 2)];

/// Decimal rendering with 12 significant digits.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let decimals = (11 - x.abs().log10().floor() as i32).max(0) as usize;
    format!("{x:.decimals$}")
}

impl<T: Scalar> PhaseTable<T> {
    pub fn to_text(&self) -> String {
        let mut s = String::from(PHASE_HEADER);
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = [r.delta, r.upper_reg, r.lower_reg, r.dim_a, r.dim_l, r.poincare]
                .iter()
                .map(|v| sig12(v.to_f64().unwrap()))
                .collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

/// Dimensions over a grid of exponents in `(k_max / 2, d]`.
pub fn phase_plot<T: Scalar>(k_min: usize, k_max: usize, d: usize, grid: &[T]) -> Result<PhaseTable<T>> {
    let rows = grid
        .iter()
        .map(|&delta| {
            if !(delta * T::two() > T::from_usize(k_max).unwrap()) {
                return Err(Error::InvalidProfile(format!("grid point {delta} is not above k_max / 2")));
            }
            let r = predict_dims(&GroupProfile::cusped(delta, k_min, k_max, d)?)?;
            Ok(PhaseRow { delta, upper_reg: r.upper_reg, lower_reg: r.lower_reg, dim_a: r.dim_a, dim_l: r.dim_l, poincare: delta })
        })
        .collect::<Result<_>>()?;
    Ok(PhaseTable { k_min, k_max, d, rows })
}

/// `n` evenly spaced exponents in `(k_max / 2, d]`, ending at `d`.
pub fn phase_grid(k_max: usize, d: usize, n: usize) -> Vec<f64> {
    let lo = k_max as f64 / 2.0;
    (1..=n).map(|i| lo + (d as f64 - lo) * i as f64 / n as f64).collect()
}
