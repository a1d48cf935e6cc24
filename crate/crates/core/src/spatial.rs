//! Spatial indices over points of R^n, n <= 3.

use std::collections::HashMap;

pub type P3 = [f64; 3];

pub fn dist2(a: &P3, b: &P3) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)
}

pub fn dist(a: &P3, b: &P3) -> f64 {
    dist2(a, b).sqrt()
}

/// Uniform hash grid for near-duplicate lookups at a fixed tolerance.
#[derive(Clone, Debug)]
pub struct HashGrid {
    cell: f64,
    cells: HashMap<[i64; 3], Vec<usize>>,
    points: Vec<P3>,
}

impl HashGrid {
    pub fn new(cell: f64) -> Self {
        Self { cell, cells: HashMap::new(), points: Vec::new() }
    }

    fn key(&self, p: &P3) -> [i64; 3] {
        [
            (p[0] / self.cell).floor() as i64,
            (p[1] / self.cell).floor() as i64,
            (p[2] / self.cell).floor() as i64,
        ]
    }

    /// Index of a stored point within `cell` of `p`, if any.
    pub fn find(&self, p: &P3) -> Option<usize> {
        let k = self.key(p);
        let mut best: Option<(f64, usize)> = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(ids) = self.cells.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) {
                        for &i in ids {
                            let d = dist2(&self.points[i], p);
                            if d <= self.cell * self.cell && best.is_none_or(|b| d < b.0) {
                                best = Some((d, i));
                            }
                        }
                    }
                }
            }
        }
        best.map(|b| b.1)
    }

    /// Inserts `p` unless a point within `cell` is already present; returns
    /// the index of the stored point and whether it was new.
    pub fn insert(&mut self, p: P3) -> (usize, bool) {
        if let Some(i) = self.find(&p) {
            return (i, false);
        }
        let i = self.points.len();
        let k = self.key(&p);
        self.cells.entry(k).or_default().push(i);
        self.points.push(p);
        (i, true)
    }

    pub fn points(&self) -> &[P3] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

const LEAF: usize = 16;

#[derive(Clone, Debug)]
enum Node {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: f64, left: usize, right: usize, lo: P3, hi: P3 },
}

/// Static k-d tree; point indices refer to the input slice.
#[derive(Clone, Debug)]
pub struct KdTree {
    points: Vec<P3>,
    order: Vec<usize>,
    nodes: Vec<Node>,
    dims: usize,
}

impl KdTree {
    pub fn new(points: &[P3], dims: usize) -> Self {
        let mut t = Self { points: points.to_vec(), order: (0..points.len()).collect(), nodes: Vec::new(), dims };
        if !points.is_empty() {
            t.build(0, points.len());
        }
        t
    }

    fn bbox(&self, start: usize, end: usize) -> (P3, P3) {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for &i in &self.order[start..end] {
            for a in 0..3 {
                lo[a] = lo[a].min(self.points[i][a]);
                hi[a] = hi[a].max(self.points[i][a]);
            }
        }
        (lo, hi)
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { start, end });
        if end - start <= LEAF {
            return id;
        }
        let (lo, hi) = self.bbox(start, end);
        let axis = (0..self.dims).max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b]))).unwrap_or(0);
        if hi[axis] - lo[axis] == 0.0 {
            return id;
        }
        let mid = (start + end) / 2;
        let pts = &self.points;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| pts[a][axis].total_cmp(&pts[b][axis]));
        let value = self.points[self.order[mid]][axis];
        let left = self.build(start, mid);
        let right = self.build(mid, end);
        self.nodes[id] = Node::Split { axis, value, left, right, lo, hi };
        id
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &P3 {
        &self.points[i]
    }

    /// Calls `f` with the index of every point within `radius` of `c`.
    pub fn within<F: FnMut(usize)>(&self, c: &P3, radius: f64, mut f: F) {
        if self.nodes.is_empty() {
            return;
        }
        let r2 = radius * radius;
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            match &self.nodes[n] {
                Node::Leaf { start, end } => {
                    for &i in &self.order[*start..*end] {
                        if dist2(&self.points[i], c) <= r2 {
                            f(i);
                        }
                    }
                }
                Node::Split { axis, value, left, right, lo, hi } => {
                    // prune on the node's bounding box
                    let mut gap = 0.0;
                    for a in 0..3 {
                        let d = (lo[a] - c[a]).max(c[a] - hi[a]).max(0.0);
                        gap += d * d;
                    }
                    if gap > r2 {
                        continue;
                    }
                    let d = c[*axis] - value;
                    if d - radius <= 0.0 {
                        stack.push(*left);
                    }
                    if d + radius >= 0.0 {
                        stack.push(*right);
                    }
                }
            }
        }
    }

    pub fn count_within(&self, c: &P3, radius: f64) -> usize {
        let mut n = 0;
        self.within(c, radius, |_| n += 1);
        n
    }

    /// Subtree totals of per-point integer weights, indexed like the nodes.
    pub fn node_sums(&self, w: &[u64]) -> Vec<u64> {
        let mut sums = vec![0u64; self.nodes.len()];
        for n in (0..self.nodes.len()).rev() {
            sums[n] = match &self.nodes[n] {
                Node::Leaf { start, end } => self.order[*start..*end].iter().map(|&i| w[i]).sum(),
                Node::Split { left, right, .. } => sums[*left] + sums[*right],
            };
        }
        sums
    }

    /// Total weight of the points within `radius` of `c`. Integer weights
    /// make the result exact, hence monotone in `radius`.
    pub fn sum_within(&self, c: &P3, radius: f64, w: &[u64], sums: &[u64]) -> u64 {
        if self.nodes.is_empty() {
            return 0;
        }
        let r2 = radius * radius;
        let mut total = 0u64;
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            match &self.nodes[n] {
                Node::Leaf { start, end } => {
                    for &i in &self.order[*start..*end] {
                        if dist2(&self.points[i], c) <= r2 {
                            total += w[i];
                        }
                    }
                }
                Node::Split { axis, value, left, right, lo, hi } => {
                    let mut gap = 0.0;
                    let mut far = 0.0;
                    for a in 0..3 {
                        let d = (lo[a] - c[a]).max(c[a] - hi[a]).max(0.0);
                        gap += d * d;
                        let e = (c[a] - lo[a]).abs().max((hi[a] - c[a]).abs());
                        far += e * e;
                    }
                    if gap > r2 {
                        continue;
                    }
                    if far <= r2 {
                        total += sums[n];
                        continue;
                    }
                    let d = c[*axis] - value;
                    if d - radius <= 0.0 {
                        stack.push(*left);
                    }
                    if d + radius >= 0.0 {
                        stack.push(*right);
                    }
                }
            }
        }
        total
    }

    /// Nearest stored point to `c` as (index, distance).
    pub fn nearest(&self, c: &P3) -> Option<(usize, f64)> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best = (usize::MAX, f64::INFINITY);
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            match &self.nodes[n] {
                Node::Leaf { start, end } => {
                    for &i in &self.order[*start..*end] {
                        let d = dist2(&self.points[i], c);
                        if d < best.1 || (d == best.1 && i < best.0) {
                            best = (i, d);
                        }
                    }
                }
                Node::Split { axis, value, left, right, lo, hi } => {
                    let mut gap = 0.0;
                    for a in 0..3 {
                        let d = (lo[a] - c[a]).max(c[a] - hi[a]).max(0.0);
                        gap += d * d;
                    }
                    if gap > best.1 {
                        continue;
                    }
                    let d = c[*axis] - value;
                    // visit the nearer side last so it is popped first
                    if d < 0.0 {
                        stack.push(*right);
                        stack.push(*left);
                    } else {
                        stack.push(*left);
                        stack.push(*right);
                    }
                }
            }
        }
        Some((best.0, best.1.sqrt()))
    }
}

/// Greedy farthest-point sample of `k` indices, starting from index 0.
pub fn farthest_point_sample(points: &[P3], k: usize) -> Vec<usize> {
    if points.is_empty() || k == 0 {
        return vec![];
    }
    let k = k.min(points.len());
    let mut chosen = vec![0usize];
    let mut d: Vec<f64> = points.iter().map(|p| dist2(p, &points[0])).collect();
    while chosen.len() < k {
        let (i, &m) = d.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0))).unwrap();
        if m == 0.0 {
            break;
        }
        chosen.push(i);
        for (j, p) in points.iter().enumerate() {
            let nd = dist2(p, &points[i]);
            if nd < d[j] {
                d[j] = nd;
            }
        }
    }
    chosen
}
