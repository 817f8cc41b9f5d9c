//! Reduction from negative-triangle detection to the exact all-pairs
//! distance sum, with a brute-force triangle oracle to check it against.
//!
//! The reduced instance is the complete graph on three copies V1, V2, V3 of
//! the input nodes. With N = 4M, an input edge (u,v) of weight ω gives
//! ω′(u1,v2) = ω′(u2,v3) = N + ω and ω′(u3,v1) = 2N − ω; every other pair
//! gets 3N/2. The input has a negative triangle iff some V3–V1 edge is not a
//! shortest path, i.e. iff aps < Σ ω′.

use crate::error::{Error, Result};
use crate::oracle;

/// Undirected graph with integer weights in [−M, M].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedGraph {
    n: usize,
    bound: i64,
    edges: Vec<(usize, usize, i64)>,
    weights: Vec<Option<i64>>,
}

impl SignedGraph {
    /// Rejects self-loops, repeated pairs, out-of-range ids and |w| > M.
    pub fn new(n: usize, bound: i64, edges: impl IntoIterator<Item = (usize, usize, i64)>) -> Result<Self> {
        if bound < 1 {
            return Err(Error::InvalidParameter(format!("weight bound M = {bound} < 1")));
        }
        let mut weights = vec![None; n * n];
        let mut list = Vec::new();
        for (u, v, w) in edges {
            for node in [u, v] {
                if node >= n {
                    return Err(Error::InvalidNode { node, n });
                }
            }
            if u == v {
                return Err(Error::InvalidParameter(format!("self-loop at {u}")));
            }
            if w.abs() > bound {
                return Err(Error::InvalidParameter(format!(
                    "weight {w} of ({u},{v}) exceeds M = {bound}"
                )));
            }
            if weights[u * n + v].is_some() {
                return Err(Error::InvalidParameter(format!("repeated edge ({u},{v})")));
            }
            weights[u * n + v] = Some(w);
            weights[v * n + u] = Some(w);
            list.push((u, v, w));
        }
        Ok(SignedGraph {
            n,
            bound,
            edges: list,
            weights,
        })
    }

    /// Bound M taken as the largest |w| (at least 1).
    pub fn with_tight_bound(n: usize, edges: Vec<(usize, usize, i64)>) -> Result<Self> {
        let bound = edges.iter().map(|e| e.2.abs()).max().unwrap_or(1).max(1);
        SignedGraph::new(n, bound, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn edges(&self) -> &[(usize, usize, i64)] {
        &self.edges
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<i64> {
        self.weights[u * self.n + v]
    }
}

/// The complete 3n-node instance. Lengths are stored doubled so that 3N/2 is
/// an integer and every comparison is exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedInstance {
    /// Nodes of the input graph; the instance has `3 * base_n` nodes.
    pub base_n: usize,
    /// N = 4M.
    pub big_n: i64,
    /// Row-major `3n × 3n` matrix of 2ω′.
    pub doubled: Vec<i64>,
}

impl ReducedInstance {
    pub fn size(&self) -> usize {
        3 * self.base_n
    }

    pub fn doubled_length(&self, a: usize, b: usize) -> i64 {
        self.doubled[a * self.size() + b]
    }

    /// ω′ as a real number.
    pub fn length(&self, a: usize, b: usize) -> f64 {
        self.doubled_length(a, b) as f64 / 2.0
    }

    /// 2·Σ_{e∈E′} ω′(e) over unordered pairs.
    pub fn doubled_edge_sum(&self) -> i64 {
        let m = self.size();
        (0..m)
            .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
            .map(|(i, j)| self.doubled_length(i, j))
            .sum()
    }

    /// 2·aps of the instance, by Floyd–Warshall.
    pub fn doubled_aps(&self) -> i64 {
        oracle::exact_aps_integer(self.size(), &self.doubled)
    }
}

/// Node id of copy `layer` (0, 1, 2 for V1, V2, V3) of input node `u`.
pub fn copy_id(base_n: usize, layer: usize, u: usize) -> usize {
    layer * base_n + u
}

/// O(n²) construction.
pub fn reduce(g: &SignedGraph) -> ReducedInstance {
    let n = g.n;
    let size = 3 * n;
    let big_n = 4 * g.bound;
    let mut doubled = vec![3 * big_n; size * size];
    for a in 0..size {
        doubled[a * size + a] = 0;
    }
    let mut set = |a: usize, b: usize, w: i64| {
        doubled[a * size + b] = w;
        doubled[b * size + a] = w;
    };
    for u in 0..n {
        for v in 0..n {
            if let Some(w) = g.weight(u, v) {
                set(copy_id(n, 0, u), copy_id(n, 1, v), 2 * (big_n + w));
                set(copy_id(n, 1, u), copy_id(n, 2, v), 2 * (big_n + w));
                set(copy_id(n, 2, u), copy_id(n, 0, v), 2 * (2 * big_n - w));
            }
        }
    }
    ReducedInstance {
        base_n: n,
        big_n,
        doubled,
    }
}

/// True iff the exact all-pairs sum of the reduced instance falls below its
/// total edge length.
pub fn detect_negative_triangle_via_aps(g: &SignedGraph) -> bool {
    let r = reduce(g);
    r.doubled_aps() < r.doubled_edge_sum()
}

/// O(n³) scan of all triples.
pub fn has_negative_triangle_bruteforce(g: &SignedGraph) -> bool {
    let n = g.n;
    for a in 0..n {
        for b in a + 1..n {
            let Some(ab) = g.weight(a, b) else { continue };
            for c in b + 1..n {
                if let (Some(bc), Some(ca)) = (g.weight(b, c), g.weight(c, a)) {
                    if ab + bc + ca < 0 {
                        return true;
                    }
                }
            }
        }
    }
    false
}
