use std::collections::HashMap;

use smallvec::SmallVec;

use super::Point;

/// Connected components of a point set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clusters {
    /// Component label of each point.
    pub labels: Vec<usize>,
    /// Point indices of each component, sorted; components are ordered by
    /// their smallest index.
    pub blocks: Vec<Vec<usize>>,
}

impl Clusters {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

type CellKey = SmallVec<[i64; 3]>;

fn cell_of(p: &Point, side: f64) -> CellKey {
    p.coords().iter().map(|c| (c / side).floor() as i64).collect()
}

/// Calls `f(i, j)` for every pair `i < j` with `|p_i - p_j| < threshold`.
fn for_each_close_pair(points: &[Point], threshold: f64, mut f: impl FnMut(usize, usize)) {
    let n = points.len();
    if n < 2 || threshold.is_nan() || threshold <= 0.0 {
        return;
    }
    if !threshold.is_finite() || n <= 32 {
        for i in 0..n {
            for j in i + 1..n {
                if points[i].dist(&points[j]) < threshold {
                    f(i, j);
                }
            }
        }
        return;
    }
    let d = points[0].dim();
    let mut grid: HashMap<CellKey, Vec<usize>> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        grid.entry(cell_of(p, threshold)).or_default().push(i);
    }
    let offsets: Vec<CellKey> = (0..3usize.pow(d as u32))
        .map(|mut k| {
            (0..d)
                .map(|_| {
                    let o = (k % 3) as i64 - 1;
                    k /= 3;
                    o
                })
                .collect()
        })
        .collect();
    for (i, p) in points.iter().enumerate() {
        let base = cell_of(p, threshold);
        for off in &offsets {
            let key: CellKey = base.iter().zip(off).map(|(a, b)| a + b).collect();
            if let Some(bucket) = grid.get(&key) {
                for &j in bucket {
                    if j > i && p.dist(&points[j]) < threshold {
                        f(i, j);
                    }
                }
            }
        }
    }
}

/// Pairs `(i, j)`, `i < j`, at distance below `threshold`, sorted.
pub fn neighbor_pairs(points: &[Point], threshold: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for_each_close_pair(points, threshold, |i, j| out.push((i, j)));
    out.sort_unstable();
    out
}

/// Components of the graph joining points at distance below `threshold`.
pub fn connected_within(points: &[Point], threshold: f64) -> Clusters {
    let n = points.len();
    let mut uf = UnionFind::new(n);
    for_each_close_pair(points, threshold, |i, j| uf.union(i, j));
    let mut label_of_root = HashMap::new();
    let mut labels = Vec::with_capacity(n);
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let root = uf.find(i);
        let next = blocks.len();
        let l = *label_of_root.entry(root).or_insert(next);
        if l == next {
            blocks.push(Vec::new());
        }
        blocks[l].push(i);
        labels.push(l);
    }
    Clusters { labels, blocks }
}

/// Clusters of the union of balls `B(x, r)`: points closer than `2r`.
pub fn cluster_decompose(points: &[Point], r: f64) -> Clusters {
    connected_within(points, 2.0 * r)
}
