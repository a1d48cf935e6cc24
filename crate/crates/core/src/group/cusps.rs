use num_complex::Complex64;

use super::orbit::{enumerate_orbit, Budget};
use super::presentation::GroupPresentation;
use crate::error::Result;
use crate::hypgeom::{classify, BoundaryPoint, IsometryClass, Mobius};
use crate::spatial::HashGrid;

/// Clustering tolerance for parabolic fixed points (chordal).
pub const CUSP_TOL: f64 = 1e-8;
/// Relative cross-product threshold for independent translations.
pub const RANK_TOL: f64 = 1e-8;

/// Parabolic fixed point with the parabolic elements found fixing it.
#[derive(Clone, Debug)]
pub struct Cusp {
    pub point: BoundaryPoint<f64>,
    pub rank: usize,
    pub stabilizer_translations: Vec<Mobius<f64>>,
    /// Translation vectors after conjugating the point to infinity.
    pub translation_vectors: Vec<Complex64>,
    pub orbit_id: usize,
}

#[derive(Clone, Debug)]
pub struct CuspReport {
    pub cusps: Vec<Cusp>,
    /// Number of distinct cusp orbits found.
    pub orbit_count: usize,
    /// Elements whose trace fell in the ambiguous band and were skipped.
    pub ambiguous: usize,
    /// Detection is exhaustive only up to the word budget, so the cusp list
    /// and ranks are lower bounds.
    pub lower_bound: bool,
}

impl CuspReport {
    pub fn k_min(&self) -> Option<usize> {
        self.cusps.iter().map(|c| c.rank).min()
    }

    pub fn k_max(&self) -> Option<usize> {
        self.cusps.iter().map(|c| c.rank).max()
    }

    pub fn is_parabolic_free(&self) -> bool {
        self.cusps.is_empty()
    }

    /// One cusp per orbit: the first detected (shortest word).
    pub fn representatives(&self) -> Vec<&Cusp> {
        let mut seen = vec![false; self.orbit_count];
        let mut out = vec![];
        for c in &self.cusps {
            if !seen[c.orbit_id] {
                seen[c.orbit_id] = true;
                out.push(c);
            }
        }
        out
    }
}

/// Translation part of a parabolic fixing infinity: `z -> z + v`.
pub fn translation_vector(m: &Mobius<f64>) -> Complex64 {
    let [_, b, _, d] = m.entries();
    b / d
}

fn rank_of(dim: usize, vs: &[Complex64]) -> usize {
    if dim == 1 {
        return 1;
    }
    for (i, a) in vs.iter().enumerate() {
        for b in &vs[i + 1..] {
            let cross = (a.re * b.im - a.im * b.re).abs();
            if cross > RANK_TOL * a.norm() * b.norm() {
                return 2;
            }
        }
    }
    1
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Detects parabolic fixed points among elements of word length at most
/// `max_word_len`, their ranks and their orbits.
pub fn find_cusps(g: &GroupPresentation, max_word_len: usize) -> Result<CuspReport> {
    let orbit = enumerate_orbit(g, Budget::new(max_word_len, f64::MAX, 2_000_000))?;
    let mut grid = HashGrid::new(CUSP_TOL);
    let mut members: Vec<Vec<Mobius<f64>>> = vec![];
    let mut ambiguous = 0;
    for p in &orbit.points {
        match classify(&p.map) {
            Ok(c) if c.class == IsometryClass::Parabolic => {
                let fp = c.fixed_points[0];
                let (i, new) = grid.insert(fp.sphere_vec());
                if new {
                    members.push(vec![]);
                }
                members[i].push(p.map);
            }
            Ok(_) => {}
            Err(_) => ambiguous += 1,
        }
    }
    let n = grid.len();
    let points: Vec<BoundaryPoint<f64>> = grid
        .points()
        .iter()
        .map(|v| BoundaryPoint::Sphere { dim: g.dim(), v: *v }.to_plane())
        .collect();

    let mut ranks = vec![0; n];
    let mut vectors = vec![vec![]; n];
    for i in 0..n {
        let c = Mobius::sending_to_infinity(&points[i]);
        vectors[i] = members[i].iter().map(|m| translation_vector(&m.conjugate_by(&c))).collect();
        ranks[i] = rank_of(g.dim(), &vectors[i]);
    }

    // orbits: p ~ h(p) for every enumerated h
    let mut parent: Vec<usize> = (0..n).collect();
    for h in &orbit.points {
        for i in 0..n {
            let img = h.map.apply_boundary(&points[i])?;
            if let Some(j) = grid.find(&img.sphere_vec()) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut orbit_of_root = vec![usize::MAX; n];
    let mut orbit_count = 0;
    let mut orbit_ids = vec![0; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if orbit_of_root[r] == usize::MAX {
            orbit_of_root[r] = orbit_count;
            orbit_count += 1;
        }
        orbit_ids[i] = orbit_of_root[r];
    }
    // rank is a conjugacy invariant: use the largest found in the orbit
    let mut orbit_rank = vec![0; orbit_count];
    for i in 0..n {
        orbit_rank[orbit_ids[i]] = orbit_rank[orbit_ids[i]].max(ranks[i]);
    }
    let cusps = (0..n)
        .map(|i| Cusp {
            point: points[i],
            rank: orbit_rank[orbit_ids[i]],
            stabilizer_translations: members[i].clone(),
            translation_vectors: vectors[i].clone(),
            orbit_id: orbit_ids[i],
        })
        .collect();
    Ok(CuspReport { cusps, orbit_count, ambiguous, lower_bound: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::builtin::{builtin, Params};

    #[test]
    fn rank_one_cusp_at_infinity() {
        let g = builtin("parabolic_cusp_fuchsian", &Params::default()).unwrap();
        let r = find_cusps(&g, 3).unwrap();
        assert!(!r.cusps.is_empty());
        let inf = r.cusps.iter().find(|c| c.point.is_infinity()).unwrap();
        assert_eq!(inf.rank, 1);
        assert_eq!(r.k_max(), Some(1));
        // every cusp found is an image of infinity
        assert_eq!(r.orbit_count, 1);
    }

    #[test]
    fn rank_two_cusp() {
        let g = builtin("rank2_cusp", &Params::default()).unwrap();
        let r = find_cusps(&g, 3).unwrap();
        let inf = r.cusps.iter().find(|c| c.point.is_infinity()).unwrap();
        assert_eq!(inf.rank, 2);
        for c in &r.cusps {
            assert_eq!(c.rank, 2);
        }
    }

    #[test]
    fn apollonian_cusps_have_rank_one() {
        let g = builtin("apollonian", &Params::default()).unwrap();
        let r = find_cusps(&g, 4).unwrap();
        assert!(r.cusps.len() > 10);
        assert!(r.cusps.iter().all(|c| c.rank == 1));
        for c in &r.cusps {
            for m in &c.stabilizer_translations {
                let cl = classify(m).unwrap();
                assert_eq!(cl.class, IsometryClass::Parabolic);
                assert!(cl.fixed_points[0].chordal_distance(&c.point) < 1e-8);
            }
        }
    }

    #[test]
    fn schottky_is_parabolic_free() {
        let g = builtin("schottky", &Params::default()).unwrap();
        assert!(find_cusps(&g, 4).unwrap().is_parabolic_free());
    }

    #[test]
    fn ranks_survive_conjugation() {
        let h = Mobius::from_complex(
            Complex64::new(1.0, 0.5),
            Complex64::new(0.3, 0.0),
            Complex64::new(0.2, -0.1),
            Complex64::new(1.0, 0.0),
        )
        .unwrap();
        let g = builtin("rank2_cusp", &Params::default()).unwrap();
        let gc = g.conjugated(&h).unwrap();
        let r = find_cusps(&gc, 3).unwrap();
        let p = h.apply_boundary(&BoundaryPoint::infinity(2)).unwrap();
        let c = r.cusps.iter().find(|c| c.point.chordal_distance(&p) < 1e-8).unwrap();
        assert_eq!(c.rank, 2);
    }
}
