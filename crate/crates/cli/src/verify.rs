//! Estimate-versus-prediction report.

use kleinian_dim::estdim::{
    assouad_dimension, box_dimension, exponent_budget, lower_dimension, poincare_exponent, LocalParams, ScaleGrid,
};
use kleinian_dim::group::{enumerate_orbit, find_cusps, sample_budget, sample_limit_set, Budget, GroupPresentation, PointCloud};
use kleinian_dim::predict::{predict_dims, sig12, GroupProfile};
use kleinian_dim::psmeasure::{
    local_dimension, patterson_measure_with, regularity, MeasureParams, RegularityParams, DEFAULT_EPSILON,
};
use kleinian_dim::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Coarsest default sampling resolution.
pub const DEFAULT_RESOLUTION: f64 = 1e-3;
/// Default resolutions are refined until about this many points are
/// expected, judged by the estimated exponent.
pub const TARGET_SAMPLE: f64 = 2000.0;
/// The default measure depth is the one reached with this many orbit
/// points...
pub const MEASURE_POINTS: usize = 3_000_000;
/// ...capped at this distance, and rounded down to a multiple of
/// [`MEASURE_DEPTH_STEP`].
pub const MEASURE_MAX_DIST: f64 = 60.0;
pub const MEASURE_DEPTH_STEP: f64 = 0.5;
/// Shell of orbit distances whose points carry the measure.
pub const MEASURE_SHELL: f64 = 2.0;
/// Word length searched for cusps.
pub const CUSP_WORDS: usize = 4;
/// Scale window `(t0, t1)` of the local dimension fits, balls `e^-t`.
pub const LOCAL_WINDOW: (f64, f64) = (2.0, 6.0);
/// Atoms whose local dimensions are pooled into the typical value.
pub const TYPICAL_SAMPLES: usize = 101;
pub const BOX_SCALES: usize = 10;

/// Box-counting window from twice the resolution to a quarter of the
/// diameter.
pub fn default_box_grid(cloud: &PointCloud) -> Result<ScaleGrid> {
    let lo = 2.0 * cloud.resolution;
    let hi = cloud.diameter_bound() / 4.0;
    if !(hi > lo) {
        return Err(Error::Precondition(format!(
            "cloud diameter {} is too small for resolution {}",
            cloud.diameter_bound(),
            cloud.resolution
        )));
    }
    ScaleGrid::new(lo, hi, BOX_SCALES)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    pub delta: f64,
    pub box_dim: f64,
    pub assouad: f64,
    pub lower: f64,
    pub regularity: f64,
    pub local: f64,
    /// Bounds for geometrically infinite groups.
    pub box_min: f64,
    pub lower_max: f64,
    pub assouad_min: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            delta: 0.05,
            box_dim: 0.1,
            assouad: 0.1,
            lower: 0.1,
            regularity: 0.15,
            local: 0.15,
            box_min: 0.65,
            lower_max: 0.2,
            assouad_min: 0.9,
        }
    }
}

impl Tolerances {
    const NAMES: [&'static str; 9] =
        ["delta", "box", "assouad", "lower", "regularity", "local", "box_min", "lower_max", "assouad_min"];

    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "delta" => &mut self.delta,
            "box" => &mut self.box_dim,
            "assouad" => &mut self.assouad,
            "lower" => &mut self.lower,
            "regularity" => &mut self.regularity,
            "local" => &mut self.local,
            "box_min" => &mut self.box_min,
            "lower_max" => &mut self.lower_max,
            "assouad_min" => &mut self.assouad_min,
            _ => return None,
        })
    }

    /// Applies `NAME=VAL`.
    pub fn set(&mut self, s: &str) -> Result<()> {
        let (name, val) =
            s.split_once('=').ok_or_else(|| Error::Parse(format!("bad tolerance {s:?}; expected NAME=VAL")))?;
        let v: f64 = val.trim().parse().map_err(|_| Error::Parse(format!("bad tolerance value {val:?}")))?;
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidParameter(format!("tolerance {name} must be finite and non-negative")));
        }
        let known = Self::NAMES.join(", ");
        let slot = self
            .slot(name.trim())
            .ok_or_else(|| Error::InvalidParameter(format!("unknown tolerance {name:?}; known: {known}")))?;
        *slot = v;
        Ok(())
    }

    fn describe(&self) -> String {
        let mut t = self.clone();
        Self::NAMES.iter().map(|n| format!("{n}={}", t.slot(n).unwrap())).collect::<Vec<_>>().join(",")
    }
}

#[derive(Clone, Debug)]
#[derive(Default)]
pub struct VerifyOptions {
    /// Defaults to [`default_resolution`].
    pub resolution: Option<f64>,
    /// Orbit depth of the measure; defaults to [`default_measure_dist`].
    pub measure_dist: Option<f64>,
    pub seed: u64,
    pub tolerances: Tolerances,
}


#[derive(Clone, Debug, PartialEq)]
pub enum Check {
    Near { predicted: f64, tolerance: f64 },
    AtLeast(f64),
    AtMost(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub name: String,
    pub check: Check,
    pub estimated: std::result::Result<f64, String>,
}

impl Row {
    pub fn passed(&self) -> bool {
        let Ok(e) = self.estimated else { return false };
        match self.check {
            Check::Near { predicted, tolerance } => (e - predicted).abs() <= tolerance,
            Check::AtLeast(b) => e >= b,
            Check::AtMost(b) => e <= b,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub group: String,
    /// `(key, value)` lines describing every input of the run.
    pub environment: Vec<(String, String)>,
    pub notes: Vec<String>,
    pub rows: Vec<Row>,
    /// Stages that failed before producing any row.
    pub errors: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.errors.is_empty() && self.rows.iter().all(Row::passed)
    }

    pub fn has_errors(&self) -> bool {
        !self.errors.is_empty() || self.rows.iter().any(|r| r.estimated.is_err())
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("group,{}\n", self.group);
        for (k, v) in &self.environment {
            s += &format!("{k},{v}\n");
        }
        for n in &self.notes {
            s += &format!("note,{n}\n");
        }
        for e in &self.errors {
            s += &format!("error,{e}\n");
        }
        s += "name,predicted,estimated,tolerance,result\n";
        for r in &self.rows {
            let (pred, tol) = match r.check {
                Check::Near { predicted, tolerance } => (sig12(predicted), format!("{tolerance}")),
                Check::AtLeast(b) => (format!(">={}", sig12(b)), "-".into()),
                Check::AtMost(b) => (format!("<={}", sig12(b)), "-".into()),
            };
            let (est, result) = match &r.estimated {
                Ok(v) => (sig12(*v), if r.passed() { "pass" } else { "fail" }),
                Err(e) => (format!("error: {}", e.replace(',', ";")), "error"),
            };
            s += &format!("{},{pred},{est},{tol},{result}\n", r.name);
        }
        s += &format!("overall,{}\n", if self.passed() { "pass" } else { "fail" });
        s
    }

    /// One line per row.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for r in &self.rows {
            let est = match &r.estimated {
                Ok(v) => format!("{v:.4}"),
                Err(e) => e.clone(),
            };
            s += &format!("{:<14} {:<5} {est}\n", r.name, if r.passed() { "pass" } else { "FAIL" });
        }
        s
    }
}

/// `min(DEFAULT_RESOLUTION, TARGET_SAMPLE^(-1/delta))`: sets of small
/// dimension need fine samples to hold more than a handful of points.
pub fn default_resolution(delta: f64) -> f64 {
    if delta > 0.0 {
        DEFAULT_RESOLUTION.min(TARGET_SAMPLE.powf(-1.0 / delta))
    } else {
        DEFAULT_RESOLUTION
    }
}

/// Depth reached by [`MEASURE_POINTS`] orbit points, rounded down to a
/// multiple of [`MEASURE_DEPTH_STEP`]. Cutting the measure orbit at a point
/// cap leaves a ragged outer shell; a distance cut does not.
pub fn default_measure_dist(g: &GroupPresentation) -> Result<f64> {
    let o = enumerate_orbit(g, Budget::new(usize::MAX, MEASURE_MAX_DIST, MEASURE_POINTS))?;
    if !o.truncated_by_points {
        return Ok(MEASURE_MAX_DIST);
    }
    Ok((o.complete_dist / MEASURE_DEPTH_STEP).floor() * MEASURE_DEPTH_STEP)
}

fn budget_text(b: &Budget) -> String {
    let words = if b.max_word_len == usize::MAX { "unbounded".to_string() } else { b.max_word_len.to_string() };
    format!("words={words},dist={},points={}", b.max_dist, b.max_points)
}

fn estimates(cloud: &PointCloud, seed: u64) -> [(String, Result<f64>); 3] {
    let boxd = default_box_grid(cloud).and_then(|grid| box_dimension(cloud, &grid, seed)).map(|e| e.value);
    let a = assouad_dimension(cloud, &LocalParams { seed, ..LocalParams::assouad() }).map(|e| e.value);
    let l = lower_dimension(cloud, &LocalParams { seed, ..LocalParams::lower() }).map(|e| e.value);
    [("box".into(), boxd), ("assouad".into(), a), ("lower".into(), l)]
}

fn row(name: &str, check: Check, est: Result<f64>) -> Row {
    Row { name: name.into(), check, estimated: est.map_err(|e| e.to_string()) }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

/// Runs every estimator on `g` and compares it with the closed-form
/// prediction. Stage failures are recorded in the report.
pub fn run(g: &GroupPresentation, opts: &VerifyOptions) -> VerificationReport {
    let tol = &opts.tolerances;
    let mut rep = VerificationReport {
        group: g.name().to_string(),
        environment: vec![("d".into(), g.dim().to_string()), ("seed".into(), opts.seed.to_string())],
        notes: vec![],
        rows: vec![],
        errors: vec![],
    };
    rep.environment.push(("tolerances".into(), tol.describe()));

    if g.is_geometrically_infinite() {
        rep.environment.push(("geometry".into(), "infinite".into()));
        rep.notes.push("geometrically infinite: closed-form predictions not applicable; bounds only".into());
        let cloud = match sample(g, opts.resolution.unwrap_or(DEFAULT_RESOLUTION), &mut rep) {
            Some(c) => c,
            None => return rep,
        };
        let [(_, b), (_, a), (_, l)] = estimates(&cloud, opts.seed);
        rep.rows.push(row("box", Check::AtLeast(tol.box_min), b));
        rep.rows.push(row("lower", Check::AtMost(tol.lower_max), l));
        rep.rows.push(row("assouad", Check::AtLeast(tol.assouad_min), a));
        return rep;
    }
    rep.environment.push(("geometry".into(), "finite".into()));

    let eb = exponent_budget();
    rep.environment.push(("exponent_budget".into(), budget_text(&eb)));
    let delta_hat = match poincare_exponent(g, eb) {
        Ok(e) => e.value,
        Err(e) => {
            rep.errors.push(format!("poincare exponent: {e}"));
            return rep;
        }
    };
    let cusps = match find_cusps(g, CUSP_WORDS) {
        Ok(c) => c,
        Err(e) => {
            rep.errors.push(format!("cusp search: {e}"));
            return rep;
        }
    };
    let profile = match g.known_profile() {
        Some(k) => GroupProfile::from_known(&k, g.dim()),
        None if cusps.is_parabolic_free() => GroupProfile::parabolic_free(delta_hat, g.dim()),
        None => GroupProfile::cusped(delta_hat, cusps.k_min().unwrap(), cusps.k_max().unwrap(), g.dim()),
    };
    let source = if g.known_profile().is_some() { "known" } else { "estimated" };
    let profile = match profile {
        Ok(p) => p,
        Err(e) => {
            rep.errors.push(format!("profile ({source}): {e}"));
            return rep;
        }
    };
    rep.environment.push((
        "profile".into(),
        format!("delta={},k_min={},k_max={},d={},source={source}", profile.delta, profile.k_min, profile.k_max, profile.d),
    ));
    let p = predict_dims(&profile).expect("validated profile");
    for l in p.corollaries.labels() {
        rep.notes.push(l);
    }
    if source == "known" {
        rep.rows.push(row("delta", Check::Near { predicted: profile.delta, tolerance: tol.delta }, Ok(delta_hat)));
    }

    let resolution = opts.resolution.unwrap_or_else(|| default_resolution(delta_hat));
    if let Some(cloud) = sample(g, resolution, &mut rep) {
        let [(_, b), (_, a), (_, l)] = estimates(&cloud, opts.seed);
        rep.rows.push(row("box", Check::Near { predicted: p.dim_h, tolerance: tol.box_dim }, b));
        rep.rows.push(row("assouad", Check::Near { predicted: p.dim_a, tolerance: tol.assouad }, a));
        rep.rows.push(row("lower", Check::Near { predicted: p.dim_l, tolerance: tol.lower }, l));
    }

    let s = delta_hat * (1.0 + DEFAULT_EPSILON);
    let depth = match opts.measure_dist.map_or_else(|| default_measure_dist(g), Ok) {
        Ok(t) => t,
        Err(e) => {
            rep.errors.push(format!("measure depth: {e}"));
            return rep;
        }
    };
    let mb = Budget::new(usize::MAX, depth, 2 * MEASURE_POINTS);
    let params = MeasureParams { shell_width: MEASURE_SHELL, cusp_word_len: CUSP_WORDS, ..MeasureParams::default() };
    let mu = match patterson_measure_with(g, s, mb, &params) {
        Ok(m) => m,
        Err(e) => {
            rep.errors.push(format!("patterson measure: {e}"));
            return rep;
        }
    };
    rep.environment.push(("measure".into(), format!("s={s},shell={MEASURE_SHELL},{}", budget_text(&mb))));
    rep.environment.push(("measure_atoms".into(), format!("{} at resolution {:e}", mu.len(), mu.resolution)));
    let (u, l) = match regularity(&mu, &RegularityParams::default()) {
        Ok((u, l)) => (Ok(u.value), Ok(l.value)),
        Err(e) => (Err(e.to_string()), Err(e.to_string())),
    };
    for (name, predicted, est) in [("upper_reg", p.upper_reg, u), ("lower_reg", p.lower_reg, l)] {
        let check = Check::Near { predicted, tolerance: tol.regularity };
        rep.rows.push(Row { name: name.into(), check, estimated: est });
    }

    // charts sit at rank-one cusps
    if let Some(z) = mu.chart_points().first() {
        let pred = 2.0 * profile.delta - 1.0;
        let est = local_dimension(&mu, z, LOCAL_WINDOW).map(|d| d.slope);
        rep.rows.push(row("local_cusp", Check::Near { predicted: pred, tolerance: tol.local }, est));
    } else if !profile.parabolic_free {
        rep.notes.push("no rank-one cusp chart; local dimension at a cusp not measured".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let typical: Result<Vec<f64>> = (0..TYPICAL_SAMPLES)
        .map(|_| {
            let a = mu.atoms()[rng.gen_range(0..mu.len())];
            local_dimension(&mu, &a, LOCAL_WINDOW).map(|d| d.slope)
        })
        .collect();
    rep.rows.push(row(
        "local_typical",
        Check::Near { predicted: profile.delta, tolerance: tol.local },
        typical.map(median),
    ));
    rep
}

/// Samples the limit set, recording the inputs or the failure.
fn sample(g: &GroupPresentation, resolution: f64, rep: &mut VerificationReport) -> Option<PointCloud> {
    let budget = sample_budget(g, resolution);
    rep.environment.push(("resolution".into(), format!("{resolution:e}")));
    rep.environment.push(("sample_budget".into(), budget_text(&budget)));
    match sample_limit_set(g, resolution, budget) {
        Ok(c) => {
            rep.environment.push(("sample".into(), format!("{} points at resolution {:e}", c.len(), c.resolution)));
            Some(c)
        }
        Err(e) => {
            rep.errors.push(format!("sampling: {e}"));
            None
        }
    }
}
