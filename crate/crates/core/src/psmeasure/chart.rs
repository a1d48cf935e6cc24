use std::collections::HashMap;

use num_complex::Complex64;

use crate::hypgeom::{BoundaryPoint, Mobius};
use crate::spatial::{dist, dist2, P3};

/// Translates of the fundamental domain on each side of it.
pub const DEFAULT_UNFOLD_TERMS: usize = 8192;
/// Cells per side of the box used to cluster the fundamental domain.
const CLUSTER_CELLS: f64 = 16.0;
/// Largest translate index evaluated on demand.
const FAR_TERMS: i64 = 1 << 40;
/// Most translates evaluated on demand for one ball.
const FAR_BATCH: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Region {
    Inside,
    Outside,
    Straddle,
}

#[derive(Clone, Debug)]
struct Translate {
    n: i64,
    /// `f^-n(o)` in the ball, and `1 - |f^-n(o)|^2`.
    y: P3,
    w1: f64,
    centre: P3,
    extent: f64,
    /// Unnormalized mass of `f^n(F)`.
    mass: f64,
    region: Region,
}

/// Atoms `fine[start..end]` grouped around `fine[rep]`.
#[derive(Clone, Debug)]
struct Cluster {
    rep: usize,
    start: usize,
    end: usize,
    mass: f64,
    radius: f64,
}

#[derive(Clone, Debug)]
struct Atom {
    w: Complex64,
    pos: P3,
    weight: f64,
}

/// Measure near a rank-one cusp `p`, obtained by unfolding.
///
/// With `c` sending `p` to infinity and `c f c^-1 = z + v`, the strip
/// `F = {k <= <w, v> / |v|^2 < k + 1}` (in `c`-coordinates) is a fundamental
/// domain for `<f>` on the limit set minus `p`. A `delta`-conformal measure
/// satisfies `mu(f^n E) = int_E |(f^n)'|^delta dmu`, and the spherical
/// derivative is the Poisson kernel `(1 - |y|^2) / |xi - y|^2` with
/// `y = f^-n(o)`. Masses inside the chordal ball `B(p, radius)` are sums
/// of these transported atoms of `F`, rescaled to the atom mass the chart
/// replaces.
#[derive(Clone, Debug)]
pub struct CuspChart {
    pub point: P3,
    pub radius: f64,
    dim: usize,
    c: Mobius<f64>,
    c_inv: Mobius<f64>,
    v: Complex64,
    delta: f64,
    kappa: f64,
    /// Cluster whose image anchors each translate.
    heaviest: usize,
    /// Strip index of the fundamental domain.
    k_ref: i64,
    fine: Vec<Atom>,
    clusters: Vec<Cluster>,
    translates: Vec<Translate>,
    /// Mass beyond the last translate, placed at `p`.
    tail: f64,
}

fn sphere_of(dim: usize, w: Complex64, c_inv: &Mobius<f64>) -> P3 {
    let z = c_inv.apply_boundary(&BoundaryPoint::Plane { dim, z: w }).expect("dimensions agree");
    z.sphere_vec()
}

fn plane_of(dim: usize, v: &P3, c: &Mobius<f64>) -> Option<Complex64> {
    match c.apply_boundary(&BoundaryPoint::Sphere { dim, v: *v }.to_plane()).ok()? {
        BoundaryPoint::Plane { z, .. } => Some(z),
        _ => None,
    }
}

fn poisson(y: &P3, w1: f64, xi: &P3) -> f64 {
    w1 / dist2(xi, y)
}

/// Fundamental domain and region of a prospective chart, before the
/// translates are computed.
#[derive(Clone, Debug)]
pub(crate) struct ChartCandidate {
    pub point: P3,
    pub radius: f64,
    dim: usize,
    c: Mobius<f64>,
    v: Complex64,
    k_ref: i64,
    fine: Vec<Atom>,
}

impl ChartCandidate {
    /// Locates the strip of `<f>` farthest from `p` and the atoms in it.
    /// `None` when the atoms do not populate it.
    pub(crate) fn new(p: &BoundaryPoint<f64>, f: &Mobius<f64>, atoms: &[P3], weights: &[f64], max_radius: f64) -> Option<Self> {
        let dim = p.dim();
        let c = Mobius::sending_to_infinity(&p.to_plane());
        let v = translation_part(&f.conjugate_by(&c));
        if !(v.norm() > 0.0) || !v.norm().is_finite() {
            return None;
        }
        let u = v / v.norm();
        let strip = |w: Complex64| ((w * u.conj()).re / v.norm()).floor() as i64;
        let pv = p.sphere_vec();
        let antipode = [-pv[0], -pv[1], -pv[2]];
        let k_ref = strip(plane_of(dim, &antipode, &c)?);
        let mut fine = vec![];
        for (a, &wt) in atoms.iter().zip(weights) {
            if let Some(w) = plane_of(dim, a, &c) {
                if strip(w) == k_ref {
                    fine.push(Atom { w, pos: *a, weight: wt });
                }
            }
        }
        if fine.len() < 2 {
            return None;
        }
        let gap = fine.iter().map(|a| dist(&a.pos, &pv)).fold(f64::INFINITY, f64::min);
        Some(Self { point: pv, radius: (0.5 * gap).min(max_radius), dim, c, v, k_ref, fine })
    }

    /// Computes `terms` translates on each side with conformal exponent
    /// `delta`. `None` when `2 delta <= 1` (the unfolded series diverges)
    /// or the region holds no atoms.
    pub(crate) fn into_chart(self, delta: f64, atoms: &[P3], weights: &[f64], terms: usize) -> Option<CuspChart> {
        if !(2.0 * delta > 1.0) {
            return None;
        }
        let Self { point: pv, radius, dim, c, v, k_ref, fine } = self;
        let c_inv = c.inverse();
        let in_mass: f64 = atoms.iter().zip(weights).filter(|(a, _)| dist(a, &pv) <= radius).map(|(_, w)| w).sum();
        if !(in_mass > 0.0) {
            return None;
        }
        let (fine, clusters) = cluster(fine);
        let heaviest = (0..clusters.len()).max_by(|&i, &j| clusters[i].mass.total_cmp(&clusters[j].mass)).unwrap();
        let n_max = terms as i64;
        let mut chart = CuspChart {
            point: pv,
            radius,
            dim,
            c,
            c_inv,
            v,
            delta,
            kappa: 1.0,
            heaviest,
            k_ref,
            fine,
            clusters,
            translates: vec![],
            tail: 0.0,
        };
        chart.translates = (-n_max..=n_max).map(|n| chart.translate(n)).collect();
        let translates = &chart.translates;
        // both ends must have entered the region for the tail to sit at p
        if translates.first()?.region != Region::Inside || translates.last()?.region != Region::Inside {
            return None;
        }
        let tail_side = |m: f64| {
            let nn = n_max as f64;
            m * nn.powf(2.0 * delta) * (nn + 0.5).powf(1.0 - 2.0 * delta) / (2.0 * delta - 1.0)
        };
        chart.tail = tail_side(translates[0].mass) + tail_side(translates.last().unwrap().mass);
        let mut total = chart.tail;
        for t in &chart.translates {
            total += match t.region {
                Region::Inside => t.mass,
                Region::Outside => 0.0,
                Region::Straddle => t.mass * chart.fraction(t, None),
            };
        }
        chart.kappa = in_mass / total;
        Some(chart)
    }
}

/// `v` for a map acting as `z -> z + v`.
fn translation_part(m: &Mobius<f64>) -> Complex64 {
    let [_, b, _, d] = m.entries();
    b / d
}

impl CuspChart {
    /// Translate `f^n(F)` with its mass, anchor and extent.
    fn translate(&self, n: i64) -> Translate {
        let back = self.c_inv.compose(&Mobius::translation(self.dim, -self.v * n as f64)).compose(&self.c);
        let y = back.orbit_point_ball();
        let w1 = 2.0 / (1.0 + back.origin_distance().cosh());
        let mut mass = 0.0;
        let images: Vec<(P3, f64)> = self
            .clusters
            .iter()
            .map(|cl| {
                let a = &self.fine[cl.rep];
                let jac = poisson(&y, w1, &a.pos);
                mass += cl.mass * jac.powf(self.delta);
                (self.translate_point(a.w, n), cl.radius * jac)
            })
            .collect();
        let centre = images[self.heaviest].0;
        let extent = images.iter().map(|(q, rad)| dist(q, &centre) + 1.5 * rad).fold(0.0, f64::max) * 1.01 + 1e-15;
        let dp = dist(&centre, &self.point);
        let region = if dp + extent <= self.radius {
            Region::Inside
        } else if dp - extent > self.radius {
            Region::Outside
        } else {
            Region::Straddle
        };
        Translate { n, y, w1, centre, extent, mass, region }
    }

    /// Translates beyond the stored ones that can meet `B(x, r)`, for a
    /// ball missing `p`. The ball is mapped to a disk in chart coordinates
    /// and the strips it crosses are listed, at most `FAR_TERMS` of them.
    fn far_range(&self, x: &P3, r: f64) -> Vec<i64> {
        let n_max = (self.translates.len() / 2) as i64;
        // chord r subtends the angle alpha; the two rim points in the plane
        // of x and p map to a diameter of the image disk
        let alpha = 2.0 * (r / 2.0).min(1.0).asin();
        let p = self.point;
        let k = x[0] * p[0] + x[1] * p[1] + x[2] * p[2];
        let mut e = [p[0] - k * x[0], p[1] - k * x[1], p[2] - k * x[2]];
        let ne = (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt();
        if !(ne > 1e-300) {
            return vec![];
        }
        e = e.map(|c| c / ne);
        let rim = |sgn: f64| -> Option<Complex64> {
            let q: P3 = std::array::from_fn(|i| alpha.cos() * x[i] + sgn * alpha.sin() * e[i]);
            plane_of(self.dim, &q, &self.c)
        };
        let (Some(a), Some(b)) = (rim(1.0), rim(-1.0)) else { return vec![] };
        let centre = (a + b) / 2.0;
        let rad = (a - b).norm() / 2.0;
        let len = self.v.norm();
        let u = self.v / len;
        let along = (centre * u.conj()).re;
        let lo = ((along - rad) / len).floor() as i64 - self.k_ref - 1;
        let hi = ((along + rad) / len).floor() as i64 - self.k_ref + 1;
        let mut out = vec![];
        for n in (lo.max(-FAR_TERMS)..=(-n_max - 1).min(hi)).chain((n_max + 1).max(lo)..=hi.min(FAR_TERMS)) {
            out.push(n);
            if out.len() >= FAR_BATCH {
                break;
            }
        }
        out
    }

    /// True when `x` lies in the region the chart replaces.
    pub fn covers(&self, x: &P3) -> bool {
        dist(x, &self.point) <= self.radius
    }

    /// Share of the mass of translate `t` inside the region (and inside
    /// `B(x, r)` when given). Clusters whose image lies wholly on one side
    /// count whole; the others are split by their atoms.
    fn fraction(&self, t: &Translate, ball: Option<(&P3, f64)>) -> f64 {
        let keep = |q: &P3, slack: f64| -> Option<bool> {
            let dp = dist(q, &self.point);
            let db = ball.map(|(x, r)| (dist(q, x), r));
            if dp - slack > self.radius || db.is_some_and(|(d, r)| d - slack > r) {
                Some(false)
            } else if dp + slack <= self.radius && db.is_none_or(|(d, r)| d + slack <= r) {
                Some(true)
            } else {
                None
            }
        };
        let (mut inside, mut all) = (0.0, 0.0);
        for cl in &self.clusters {
            let rep = &self.fine[cl.rep];
            let jac = poisson(&t.y, t.w1, &rep.pos);
            let m = cl.mass * jac.powf(self.delta);
            all += m;
            let q = self.translate_point(rep.w, t.n);
            match keep(&q, 1.5 * cl.radius * jac * 1.01 + 1e-15) {
                Some(true) => inside += m,
                Some(false) => {}
                None => {
                    let (mut a_in, mut a_all) = (0.0, 0.0);
                    for a in &self.fine[cl.start..cl.end] {
                        let wa = a.weight * poisson(&t.y, t.w1, &a.pos).powf(self.delta);
                        a_all += wa;
                        if keep(&self.translate_point(a.w, t.n), 0.0) == Some(true) {
                            a_in += wa;
                        }
                    }
                    if a_all > 0.0 {
                        inside += m * a_in / a_all;
                    }
                }
            }
        }
        if all > 0.0 {
            inside / all
        } else {
            0.0
        }
    }

    /// Mass of `B(x, r)` intersected with the chart region.
    pub fn mass(&self, x: &P3, r: f64) -> f64 {
        let dp = dist(x, &self.point);
        if dp > r + self.radius {
            return 0.0;
        }
        let mut total = 0.0;
        for t in &self.translates {
            if t.region == Region::Outside {
                continue;
            }
            let dc = dist(x, &t.centre);
            if dc - t.extent > r {
                continue;
            }
            if dc + t.extent <= r && t.region == Region::Inside {
                total += t.mass;
            } else {
                total += t.mass * self.fraction(t, Some((x, r)));
            }
        }
        if dp <= r {
            total += self.tail;
        } else {
            for n in self.far_range(x, r) {
                let t = self.translate(n);
                total += t.mass * self.fraction(&t, Some((x, r)));
            }
        }
        self.kappa * total
    }

    /// Unfolding translation in chart coordinates.
    pub fn translation(&self) -> Complex64 {
        self.v
    }

    /// Boundary point `f^n(q)` for a point `q` of the fundamental domain,
    /// given by its chart coordinate.
    pub fn translate_point(&self, w: Complex64, n: i64) -> P3 {
        sphere_of(self.dim, w + self.v * n as f64, &self.c_inv)
    }

    /// Chart coordinate of the heaviest atom of the fundamental domain.
    pub fn reference_coordinate(&self) -> Complex64 {
        self.fine.iter().max_by(|a, b| a.weight.total_cmp(&b.weight)).map(|a| a.w).unwrap()
    }
}

/// Groups atoms by cells of a box grid, reordering them so that each
/// cluster is a contiguous run. The representative is the member nearest
/// the weighted mean.
fn cluster(atoms: Vec<Atom>) -> (Vec<Atom>, Vec<Cluster>) {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for a in &atoms {
        for k in 0..3 {
            lo[k] = lo[k].min(a.pos[k]);
            hi[k] = hi[k].max(a.pos[k]);
        }
    }
    let side = (0..3).map(|k| hi[k] - lo[k]).fold(0.0, f64::max) / CLUSTER_CELLS;
    let side = if side > 0.0 { side } else { 1.0 };
    let mut groups: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    for (i, a) in atoms.iter().enumerate() {
        groups.entry(a.pos.map(|x| (x / side).floor() as i64)).or_default().push(i);
    }
    let mut keys: Vec<_> = groups.keys().copied().collect();
    keys.sort_unstable();
    let mut fine = Vec::with_capacity(atoms.len());
    let mut clusters = vec![];
    for k in keys {
        let members = &groups[&k];
        let mass: f64 = members.iter().map(|&i| atoms[i].weight).sum();
        let mut mean = [0.0; 3];
        for &i in members {
            for c in 0..3 {
                mean[c] += atoms[i].pos[c] * atoms[i].weight / mass;
            }
        }
        let rep = *members.iter().min_by(|&&i, &&j| dist2(&atoms[i].pos, &mean).total_cmp(&dist2(&atoms[j].pos, &mean))).unwrap();
        let radius = members.iter().map(|&i| dist(&atoms[i].pos, &atoms[rep].pos)).fold(0.0, f64::max);
        let start = fine.len();
        let rep_at = start + members.iter().position(|&i| i == rep).unwrap();
        fine.extend(members.iter().map(|&i| atoms[i].clone()));
        clusters.push(Cluster { rep: rep_at, start, end: fine.len(), mass, radius });
    }
    (fine, clusters)
}
