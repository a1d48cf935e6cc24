use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use super::presentation::{inverse_letter, GroupPresentation, Letter};
use crate::error::{Error, Result};
use crate::hypgeom::{BoundaryPoint, InteriorPoint, Mobius, Model};

/// Limits for orbit enumeration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Budget {
    pub max_word_len: usize,
    pub max_dist: f64,
    pub max_points: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self { max_word_len: 256, max_dist: 12.0, max_points: 1_000_000 }
    }
}

impl Budget {
    pub fn new(max_word_len: usize, max_dist: f64, max_points: usize) -> Self {
        Self { max_word_len, max_dist, max_points }
    }
}

const NO_PARENT: u32 = u32::MAX;

/// Element `g` of the group with the image of the base point.
#[derive(Clone, Debug)]
pub struct OrbitPoint {
    pub map: Mobius<f64>,
    /// Hyperbolic distance from the base point to `g(o)`.
    pub dist: f64,
    pub word_len: usize,
    parent: u32,
    letter: Letter,
}

impl OrbitPoint {
    /// `g(o)` in the ball model.
    pub fn point(&self) -> InteriorPoint<f64> {
        self.map.orbit_point(Model::Ball)
    }

    /// Radial projection of `g(o)` to the boundary sphere.
    pub fn projection(&self) -> [f64; 3] {
        let v = self.map.orbit_point_ball();
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n == 0.0 {
            let mut e = [0.0; 3];
            e[self.map.dim()] = 1.0;
            return e;
        }
        [v[0] / n, v[1] / n, v[2] / n]
    }

    pub fn boundary_projection(&self) -> BoundaryPoint<f64> {
        BoundaryPoint::Sphere { dim: self.map.dim(), v: self.projection() }
    }
}

/// Result of an enumeration, sorted by distance.
#[derive(Clone, Debug)]
pub struct Orbit {
    pub points: Vec<OrbitPoint>,
    /// Point cap reached before the distance bound was exhausted.
    pub truncated_by_points: bool,
    /// Some word within the distance bound was cut by the length cap.
    pub truncated_by_words: bool,
    /// Distance up to which the enumeration is exhaustive (best-first order).
    pub complete_dist: f64,
    pub budget: Budget,
}

impl Orbit {
    pub fn truncated(&self) -> bool {
        self.truncated_by_points || self.truncated_by_words
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Freely reduced word of the `i`-th point.
    pub fn word(&self, i: usize) -> Vec<Letter> {
        let mut out = Vec::with_capacity(self.points[i].word_len);
        let mut j = i;
        while self.points[j].parent != NO_PARENT {
            out.push(self.points[j].letter);
            j = self.points[j].parent as usize;
        }
        out.reverse();
        out
    }

    /// Number of points with distance at most `t`.
    pub fn count_within(&self, t: f64) -> usize {
        self.points.partition_point(|p| p.dist <= t)
    }
}

/// Key of a canonical matrix on a 1e-9 grid; the grid is relative for
/// entries larger than one so that keys never overflow. The first slot
/// holds the binary exponent of the grid step.
pub fn matrix_key(m: &Mobius<f64>) -> [i64; 9] {
    let e = m.entries();
    let comps = [e[0].re, e[0].im, e[1].re, e[1].im, e[2].re, e[2].im, e[3].re, e[3].im];
    let scale = comps.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let exp = if scale <= 1.0 { 0 } else { scale.log2().ceil() as i32 };
    let step = 1e-9 * 2f64.powi(exp);
    let mut key = [0i64; 9];
    key[0] = exp as i64;
    for (k, x) in key[1..].iter_mut().zip(comps) {
        *k = (x / step).round() as i64;
    }
    key
}

#[derive(PartialEq)]
struct Entry {
    dist: f64,
    idx: u32,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (dist, idx)
        other.dist.total_cmp(&self.dist).then_with(|| other.idx.cmp(&self.idx))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Threshold for the non-discreteness heuristic: this many distinct
/// elements moving the base point less than `CLUSTER_RADIUS`.
const CLUSTER_LIMIT: usize = 64;
const CLUSTER_RADIUS: f64 = 0.01;

const TRIM_SLACK: usize = 1 << 16;

/// Keeps the `keep` nearest pending entries, drops every other
/// unpopped node and reindexes. Returns the new pruning distance.
fn trim(
    nodes: &mut Vec<OrbitPoint>,
    seen: &mut HashMap<[i64; 9], u32>,
    heap: &mut BinaryHeap<Entry>,
    order: &mut [u32],
    keep: usize,
) -> f64 {
    let mut pending = std::mem::take(heap).into_vec();
    // Entry orders by reversed distance, so the nearest entries sort last
    let keep_from = pending.len() - keep;
    if keep_from > 0 {
        pending.select_nth_unstable(keep_from - 1);
    }
    let pending = pending.split_off(keep_from);
    let limit = pending.iter().map(|e| e.dist).fold(0.0, f64::max);
    let mut live = vec![false; nodes.len()];
    for &i in order.iter() {
        live[i as usize] = true;
    }
    for e in &pending {
        live[e.idx as usize] = true;
    }
    let mut new_index = vec![NO_PARENT; nodes.len()];
    let mut kept = Vec::with_capacity(order.len() + pending.len());
    for (i, n) in std::mem::take(nodes).into_iter().enumerate() {
        if live[i] {
            new_index[i] = kept.len() as u32;
            kept.push(n);
        }
    }
    for n in &mut kept {
        if n.parent != NO_PARENT {
            n.parent = new_index[n.parent as usize];
        }
    }
    for i in order.iter_mut() {
        *i = new_index[*i as usize];
    }
    seen.clear();
    for (i, n) in kept.iter().enumerate() {
        seen.insert(matrix_key(&n.map), i as u32);
    }
    *heap = pending.into_iter().map(|e| Entry { dist: e.dist, idx: new_index[e.idx as usize] }).collect();
    *nodes = kept;
    limit
}

/// Enumerates orbit points in order of increasing distance over freely
/// reduced words, deduplicating equal group elements.
///
/// Children farther than `max_dist` are pruned. Enumeration stops when the
/// point cap is reached; the result then covers every point found up to
/// `complete_dist`.
pub fn enumerate_orbit(g: &GroupPresentation, budget: Budget) -> Result<Orbit> {
    if !(budget.max_dist > 0.0) || budget.max_points == 0 {
        return Err(Error::InvalidParameter("orbit budgets must be positive".into()));
    }
    let letters: Vec<Mobius<f64>> = (0..g.letter_count() as Letter).map(|l| g.letter_map(l)).collect();
    let id = Mobius::identity(g.dim());
    let mut nodes = vec![OrbitPoint { map: id, dist: 0.0, word_len: 0, parent: NO_PARENT, letter: 0 }];
    let mut seen: HashMap<[i64; 9], u32> = HashMap::new();
    seen.insert(matrix_key(&id), 0);
    let mut heap = BinaryHeap::new();
    heap.push(Entry { dist: 0.0, idx: 0 });
    let mut order: Vec<u32> = Vec::new();
    let mut near = 1usize;
    let mut truncated_by_points = false;
    let mut truncated_by_words = false;
    let mut complete_dist = budget.max_dist;
    // children beyond this can no longer be reached within the point cap
    let mut limit = budget.max_dist;

    while let Some(Entry { dist, idx }) = heap.pop() {
        if order.len() >= budget.max_points {
            truncated_by_points = true;
            complete_dist = dist;
            break;
        }
        order.push(idx);
        let node = nodes[idx as usize].clone();
        for (l, m) in letters.iter().enumerate() {
            let l = l as Letter;
            if node.parent != NO_PARENT && l == inverse_letter(node.letter) {
                continue;
            }
            let child = node.map.compose(m);
            let d = child.origin_distance();
            if !(d <= limit) {
                continue;
            }
            let key = matrix_key(&child);
            if seen.contains_key(&key) {
                continue;
            }
            if node.word_len >= budget.max_word_len {
                truncated_by_words = true;
                continue;
            }
            let ci = nodes.len() as u32;
            seen.insert(key, ci);
            if d < CLUSTER_RADIUS {
                near += 1;
                if near > CLUSTER_LIMIT {
                    return Err(Error::NonDiscrete(format!(
                        "more than {CLUSTER_LIMIT} distinct elements move the base point less than {CLUSTER_RADIUS}"
                    )));
                }
            }
            nodes.push(OrbitPoint { map: child, dist: d, word_len: node.word_len + 1, parent: idx, letter: l });
            heap.push(Entry { dist: d, idx: ci });
        }
        let remaining = budget.max_points - order.len();
        if remaining > 0 && heap.len() > 2 * remaining + TRIM_SLACK {
            // one entry beyond the cap survives to mark the truncation
            limit = trim(&mut nodes, &mut seen, &mut heap, &mut order, remaining + 1);
        }
    }

    // stable sort of the popped nodes by distance, with parents remapped
    let mut sorted: Vec<u32> = order;
    sorted.sort_by(|&a, &b| nodes[a as usize].dist.total_cmp(&nodes[b as usize].dist).then(a.cmp(&b)));
    let mut new_index = vec![NO_PARENT; nodes.len()];
    for (i, &n) in sorted.iter().enumerate() {
        new_index[n as usize] = i as u32;
    }
    let points = sorted
        .iter()
        .map(|&n| {
            let mut p = nodes[n as usize].clone();
            if p.parent != NO_PARENT {
                p.parent = new_index[p.parent as usize];
            }
            p
        })
        .collect();
    Ok(Orbit { points, truncated_by_points, truncated_by_words, complete_dist, budget })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::builtin::{builtin, Params};

    fn schottky2() -> GroupPresentation {
        builtin("schottky", &Params::from_pairs(&[("d", 1.0)])).unwrap()
    }

    #[test]
    fn zero_length_gives_identity() {
        let o = enumerate_orbit(&schottky2(), Budget::new(0, 10.0, 100)).unwrap();
        assert_eq!(o.len(), 1);
        assert_eq!(o.points[0].dist, 0.0);
        assert!(o.truncated_by_words);
    }

    #[test]
    fn trimming_matches_full_enumeration() {
        // 398 letters: the pending heap outgrows the cap after a few hundred pops
        let g = builtin("infinite_fuchsian", &Params::default()).unwrap();
        let capped = enumerate_orbit(&g, Budget::new(usize::MAX, f64::INFINITY, 1000)).unwrap();
        assert!(capped.truncated_by_points);
        let full = enumerate_orbit(&g, Budget::new(usize::MAX, capped.complete_dist, 1_000_000)).unwrap();
        assert!(!full.truncated_by_points);
        let a: Vec<f64> = capped.points.iter().map(|p| p.dist).filter(|&d| d < capped.complete_dist).collect();
        let b: Vec<f64> = full.points.iter().map(|p| p.dist).filter(|&d| d < capped.complete_dist).collect();
        assert_eq!(a, b);
        for i in (0..capped.len()).step_by(97) {
            let m = g.evaluate(&capped.word(i));
            assert!((m.origin_distance() - capped.points[i].dist).abs() < 1e-6);
        }
    }

    #[test]
    fn free_group_word_count() {
        let o = enumerate_orbit(&schottky2(), Budget::new(2, 1e3, 1000)).unwrap();
        assert_eq!(o.len(), 17);
        for i in 0..o.len() {
            let w = o.word(i);
            assert_eq!(w.len(), o.points[i].word_len);
            for pair in w.windows(2) {
                assert_ne!(pair[1], inverse_letter(pair[0]));
            }
            let m = schottky2().evaluate(&w);
            assert!(m.max_entry_diff(&o.points[i].map) < 1e-9);
        }
    }

    #[test]
    fn sorted_and_deterministic() {
        let g = builtin("apollonian", &Params::default()).unwrap();
        let a = enumerate_orbit(&g, Budget::new(8, 6.0, 10_000)).unwrap();
        let b = enumerate_orbit(&g, Budget::new(8, 6.0, 10_000)).unwrap();
        assert_eq!(a.len(), b.len());
        for (p, q) in a.points.iter().zip(&b.points) {
            assert_eq!(p.map, q.map);
            assert_eq!(p.dist, q.dist);
        }
        assert!(a.points.windows(2).all(|w| w[0].dist <= w[1].dist));
    }

    /// Distinct elements among all reduced words, by all-pairs comparison.
    fn brute_force_distinct(g: &GroupPresentation, len: usize) -> usize {
        let n = g.letter_count() as Letter;
        let mut words: Vec<Vec<Letter>> = vec![vec![]];
        let mut frontier = words.clone();
        for _ in 0..len {
            let mut next = vec![];
            for w in &frontier {
                for l in 0..n {
                    if w.last().is_some_and(|&x| l == inverse_letter(x)) {
                        continue;
                    }
                    let mut v = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
            words.extend(next.iter().cloned());
            frontier = next;
        }
        let mats: Vec<Mobius<f64>> = words.iter().map(|w| g.evaluate(w)).collect();
        let mut distinct: Vec<Mobius<f64>> = vec![];
        for m in mats {
            let scale = m.frobenius_sq().sqrt();
            if !distinct.iter().any(|d| d.max_entry_diff(&m) <= 1e-9 * scale.max(1.0)) {
                distinct.push(m);
            }
        }
        distinct.len()
    }

    #[test]
    fn dedup_matches_brute_force_with_relations() {
        for name in ["apollonian", "rank2_cusp"] {
            let g = builtin(name, &Params::default()).unwrap();
            let reduced_words: usize = {
                let k = g.letter_count();
                1 + (1..=3).map(|l| k * (k - 1).pow(l - 1)).sum::<usize>()
            };
            let o = enumerate_orbit(&g, Budget::new(3, 1e3, 1_000_000)).unwrap();
            let oracle = brute_force_distinct(&g, 3);
            assert!(o.len() < reduced_words, "{name}");
            assert_eq!(o.len(), oracle, "{name}");
        }
    }

    #[test]
    fn point_cap_sets_flag() {
        let g = builtin("apollonian", &Params::default()).unwrap();
        let o = enumerate_orbit(&g, Budget::new(64, 20.0, 500)).unwrap();
        assert_eq!(o.len(), 500);
        assert!(o.truncated_by_points);
        assert!(o.complete_dist >= o.points.last().unwrap().dist);
    }

    #[test]
    fn elliptic_rotation_is_non_discrete() {
        // irrational rotation about the base point
        let th: f64 = 1.0;
        let r = Mobius::from_real((th / 2.0).cos(), -(th / 2.0).sin(), (th / 2.0).sin(), (th / 2.0).cos()).unwrap();
        let g = GroupPresentation::from_maps("rot", 1, vec![r]).unwrap();
        let e = enumerate_orbit(&g, Budget::new(500, 5.0, 10_000)).unwrap_err();
        assert!(e.to_string().contains("group appears non-discrete"));
    }

    #[test]
    fn cyclic_growth_is_linear() {
        let h = Mobius::from_real(2.0, 0.0, 0.0, 0.5).unwrap();
        let g = GroupPresentation::from_maps("cyc", 1, vec![h]).unwrap();
        let o = enumerate_orbit(&g, Budget::new(1000, 40.0, 100_000)).unwrap();
        // translation length 2 ln 2: 2 elements per shell
        let n20 = o.count_within(20.0) as f64;
        let n40 = o.count_within(40.0) as f64;
        assert!((n40 / n20 - 2.0).abs() < 0.2);
    }
}
