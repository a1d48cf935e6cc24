use super::cusps::{CuspReport, CUSP_TOL};
use super::orbit::{enumerate_orbit, Budget};
use super::presentation::GroupPresentation;
use crate::error::{Error, Result};
use crate::hypgeom::{BoundaryPoint, Horoball, Model};
use crate::spatial::{dist, HashGrid, P3};

/// Maximum number of halvings of the reference horoballs.
pub const MAX_HALVINGS: u32 = 40;

/// Equivariant family of pairwise disjoint horoballs in the ball model.
#[derive(Clone, Debug)]
pub struct HoroballFamily {
    pub horoballs: Vec<Horoball<f64>>,
    /// Reference horoball for each cusp orbit, half-space model.
    pub references: Vec<Horoball<f64>>,
    /// Reference horoballs were shrunk by `2^-halvings`.
    pub halvings: u32,
    pub min_diameter: f64,
    index: HashGrid,
}

impl HoroballFamily {
    /// Family with no horoballs, for parabolic-free groups.
    pub fn empty() -> Self {
        Self { horoballs: vec![], references: vec![], halvings: 0, min_diameter: 0.0, index: HashGrid::new(CUSP_TOL) }
    }

    /// Builds a family from explicit horoballs (converted to the ball
    /// model), checking disjointness.
    pub fn from_horoballs(horoballs: Vec<Horoball<f64>>) -> Result<Self> {
        let horoballs: Vec<_> = horoballs.into_iter().map(|h| h.to_model(Model::Ball)).collect();
        if let Some((i, j)) = first_overlap(&horoballs) {
            return Err(Error::Horoballs(format!("horoballs {i} and {j} overlap")));
        }
        let mut index = HashGrid::new(CUSP_TOL);
        for h in &horoballs {
            index.insert(h.base().sphere_vec());
        }
        let min_diameter = horoballs.iter().map(|h| h.size()).fold(f64::INFINITY, f64::min);
        Ok(Self { horoballs, references: vec![], halvings: 0, min_diameter, index })
    }

    pub fn len(&self) -> usize {
        self.horoballs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.horoballs.is_empty()
    }

    /// Family member based at `p`, if present.
    pub fn find(&self, p: &BoundaryPoint<f64>) -> Option<&Horoball<f64>> {
        self.index.find(&p.sphere_vec()).map(|i| &self.horoballs[i])
    }

    pub fn ranks(&self) -> impl Iterator<Item = usize> + '_ {
        self.horoballs.iter().map(|h| h.rank())
    }
}

fn ball_geometry(h: &Horoball<f64>) -> (P3, f64) {
    let v = h.base().sphere_vec();
    let r = h.size() / 2.0;
    ([v[0] * (1.0 - r), v[1] * (1.0 - r), v[2] * (1.0 - r)], r)
}

/// First pair of overlapping ball-model horoballs; tangency is allowed up
/// to a relative slack of 1e-9.
pub fn first_overlap(hs: &[Horoball<f64>]) -> Option<(usize, usize)> {
    let geo: Vec<(P3, f64)> = hs.iter().map(ball_geometry).collect();
    let mut order: Vec<usize> = (0..hs.len()).collect();
    order.sort_by(|&a, &b| (geo[a].0[0] - geo[a].1).total_cmp(&(geo[b].0[0] - geo[b].1)));
    for (k, &i) in order.iter().enumerate() {
        let (ci, ri) = geo[i];
        for &j in &order[k + 1..] {
            let (cj, rj) = geo[j];
            if cj[0] - rj > ci[0] + ri {
                break;
            }
            if dist(&ci, &cj) < (ri + rj) * (1.0 - 1e-9) {
                return Some((i.min(j), i.max(j)));
            }
        }
    }
    None
}

/// Reference horoball at `p`: after sending `p` to infinity it is the
/// region above height `2^halvings`.
fn reference(p: &BoundaryPoint<f64>, rank: usize, halvings: u32) -> Result<Horoball<f64>> {
    let scale = 2f64.powi(halvings as i32);
    match p.to_plane() {
        BoundaryPoint::Infinity { dim } => Horoball::new(BoundaryPoint::Infinity { dim }, scale, rank),
        q => Horoball::new(q, 1.0 / scale, rank),
    }
}

/// Builds a standard horoball family: one reference horoball per cusp
/// orbit, shrunk by the smallest power of two that makes all images under
/// the enumerated elements pairwise disjoint. Images with ball-model
/// diameter below `min_diameter` are dropped.
pub fn standard_horoballs(
    g: &GroupPresentation,
    cusps: &CuspReport,
    min_diameter: f64,
    budget: Budget,
) -> Result<HoroballFamily> {
    if !(min_diameter > 0.0) {
        return Err(Error::InvalidParameter("min_diameter must be positive".into()));
    }
    if cusps.is_parabolic_free() {
        return Ok(HoroballFamily::empty());
    }
    let orbit = enumerate_orbit(g, budget)?;
    let reps = cusps.representatives();
    for halvings in 0..=MAX_HALVINGS {
        let refs: Vec<Horoball<f64>> =
            reps.iter().map(|c| reference(&c.point, c.rank, halvings)).collect::<Result<_>>()?;
        let mut index = HashGrid::new(CUSP_TOL);
        let mut family: Vec<Horoball<f64>> = vec![];
        let mut clash = false;
        'outer: for e in &orbit.points {
            for r in &refs {
                let h = r.image(&e.map)?.to_model(Model::Ball);
                if h.size() < min_diameter {
                    continue;
                }
                let (i, new) = index.insert(h.base().sphere_vec());
                if new {
                    family.push(h);
                } else if (family[i].size() - h.size()).abs() > 1e-6 * h.size() {
                    // two references land on one point with different sizes
                    clash = true;
                    break 'outer;
                }
            }
        }
        if clash || first_overlap(&family).is_some() {
            continue;
        }
        return Ok(HoroballFamily { horoballs: family, references: refs, halvings, min_diameter, index });
    }
    Err(Error::Horoballs(format!(
        "no disjoint family after {MAX_HALVINGS} halvings; cusps may be misdetected"
    )))
}

/// Distance budget that reaches every family member of ball diameter at
/// least `min_diameter`, given the reference shrink (see the module tests).
pub fn horoball_budget(min_diameter: f64, halvings_guess: u32) -> Budget {
    let d = (2.0 / min_diameter).ln() + halvings_guess as f64 * std::f64::consts::LN_2 + 3.5;
    Budget::new(usize::MAX, d, 3_000_000)
}
