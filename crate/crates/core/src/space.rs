//! Graphs, metric point sets, and the [`DistanceSpace`] handle that hides
//! which of the two backs a computation.
//!
//! Every distance the estimators consume flows through a `DistanceSpace`,
//! which keeps exact counters of resolved distances and single-source
//! computations. Budget claims in tests are asserted against those counters.

use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BinaryHeap};
use std::hash::{Hash, Hasher};
use std::ops::Sub;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Tolerance used when validating the triangle inequality of explicit matrices.
pub const METRIC_TOLERANCE: f64 = 1e-9;

/// Undirected graph with nonnegative edge lengths.
///
/// Edges are stored once with `u < v`, sorted; parallel edges keep the
/// minimum length and self-loops are dropped.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    offsets: Vec<usize>,
    targets: Vec<(usize, f64)>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (u, v, w) in edges {
            for node in [u, v] {
                if node >= n {
                    return Err(Error::InvalidNode { node, n });
                }
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "edge ({u},{v}) has length {w}"
                )));
            }
            if u == v {
                continue;
            }
            let key = (u.min(v), u.max(v));
            merged
                .entry(key)
                .and_modify(|old| *old = old.min(w))
                .or_insert(w);
        }
        let edges: Vec<_> = merged.into_iter().map(|((u, v), w)| (u, v, w)).collect();

        let mut degree = vec![0usize; n + 1];
        for &(u, v, _) in &edges {
            degree[u + 1] += 1;
            degree[v + 1] += 1;
        }
        for i in 0..n {
            degree[i + 1] += degree[i];
        }
        let offsets = degree;
        let mut fill = offsets.clone();
        let mut targets = vec![(0usize, 0.0f64); 2 * edges.len()];
        for &(u, v, w) in &edges {
            targets[fill[u]] = (v, w);
            fill[u] += 1;
            targets[fill[v]] = (u, w);
            fill[v] += 1;
        }

        Ok(Graph {
            n,
            edges,
            offsets,
            targets,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn neighbors(&self, u: usize) -> &[(usize, f64)] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    /// Binary-heap Dijkstra. Unreachable nodes keep `f64::INFINITY`.
    /// Stops early once `stop_at` is settled.
    fn dijkstra(&self, source: usize, stop_at: Option<usize>) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.n];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(HeapEntry {
            cost: 0.0,
            node: source,
        });
        while let Some(HeapEntry { cost, node }) = heap.pop() {
            if cost > dist[node] {
                continue;
            }
            if stop_at == Some(node) {
                break;
            }
            for &(next, w) in self.neighbors(node) {
                let candidate = cost + w;
                if candidate < dist[next] {
                    dist[next] = candidate;
                    heap.push(HeapEntry {
                        cost: candidate,
                        node: next,
                    });
                }
            }
        }
        dist
    }
}

#[derive(Copy, Clone, PartialEq)]
struct HeapEntry {
    cost: f64,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on cost, then node id
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A finite set of points in a metric space.
#[derive(Debug, Clone, PartialEq)]
pub enum PointSet {
    /// Row-major coordinates, `dim` values per point.
    Euclidean { dim: usize, coords: Vec<f64> },
    /// Explicit symmetric `n × n` distance matrix, row-major.
    Matrix { n: usize, d: Vec<f64> },
}

impl PointSet {
    pub fn euclidean(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidParameter(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite coordinate {bad}")));
        }
        Ok(PointSet::Euclidean { dim, coords })
    }

    /// Validates symmetry, zero diagonal, nonnegativity and the triangle
    /// inequality (within [`METRIC_TOLERANCE`]). The triangle check is cubic.
    pub fn from_matrix(n: usize, d: Vec<f64>) -> Result<Self> {
        if d.len() != n * n {
            return Err(Error::InvalidParameter(format!(
                "matrix has {} entries, expected {}",
                d.len(),
                n * n
            )));
        }
        for i in 0..n {
            if d[i * n + i] != 0.0 {
                return Err(Error::InvalidParameter(format!("d({i},{i}) is not zero")));
            }
            for j in 0..n {
                let x = d[i * n + j];
                if !x.is_finite() || x < 0.0 {
                    return Err(Error::InvalidParameter(format!("d({i},{j}) = {x}")));
                }
                if x != d[j * n + i] {
                    return Err(Error::InvalidParameter(format!(
                        "matrix is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let dij = d[i * n + j];
                for k in 0..n {
                    if d[i * n + k] > dij + d[j * n + k] + METRIC_TOLERANCE {
                        return Err(Error::NotAMetric { i, j, k });
                    }
                }
            }
        }
        Ok(PointSet::Matrix { n, d })
    }

    pub fn len(&self) -> usize {
        match self {
            PointSet::Euclidean { dim, coords } => coords.len() / dim,
            PointSet::Matrix { n, .. } => *n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, i: usize) -> Option<&[f64]> {
        match self {
            PointSet::Euclidean { dim, coords } => Some(&coords[i * dim..(i + 1) * dim]),
            PointSet::Matrix { .. } => None,
        }
    }

    fn raw_distance(&self, u: usize, v: usize) -> f64 {
        match self {
            PointSet::Euclidean { dim, coords } => {
                euclidean(&coords[u * dim..(u + 1) * dim], &coords[v * dim..(v + 1) * dim])
            }
            PointSet::Matrix { n, d } => d[u * n + v],
        }
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Backing {
    Graph(Graph),
    Points(PointSet),
}

/// Resources consumed by distance queries.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Budget {
    /// Resolved pairwise distances (self-distances are free).
    pub distance_evals: u64,
    /// Single-source computations (Dijkstra runs or row scans).
    pub sssp_calls: u64,
}

impl Sub for Budget {
    type Output = Budget;

    fn sub(self, rhs: Budget) -> Budget {
        Budget {
            distance_evals: self.distance_evals - rhs.distance_evals,
            sssp_calls: self.sssp_calls - rhs.sssp_calls,
        }
    }
}

impl std::ops::Add for Budget {
    type Output = Budget;

    fn add(self, rhs: Budget) -> Budget {
        Budget {
            distance_evals: self.distance_evals + rhs.distance_evals,
            sssp_calls: self.sssp_calls + rhs.sssp_calls,
        }
    }
}

#[derive(Debug, Default)]
struct Counters {
    distance_evals: AtomicU64,
    sssp_calls: AtomicU64,
}

/// Distances from one source to every element.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceVector {
    pub source: usize,
    pub d: Vec<f64>,
    /// Σ d, i.e. the distance sum W(source).
    pub sum: f64,
}

/// Immutable handle over a graph or a point set, with metering.
///
/// Shareable across threads. [`DistanceSpace::fork`] returns a handle on the
/// same data with fresh counters.
#[derive(Debug)]
pub struct DistanceSpace {
    backing: Arc<Backing>,
    counters: Counters,
}

impl From<Graph> for DistanceSpace {
    fn from(g: Graph) -> Self {
        DistanceSpace::new(Backing::Graph(g))
    }
}

impl From<PointSet> for DistanceSpace {
    fn from(p: PointSet) -> Self {
        DistanceSpace::new(Backing::Points(p))
    }
}

impl DistanceSpace {
    pub fn new(backing: Backing) -> Self {
        DistanceSpace {
            backing: Arc::new(backing),
            counters: Counters::default(),
        }
    }

    pub fn fork(&self) -> Self {
        DistanceSpace {
            backing: Arc::clone(&self.backing),
            counters: Counters::default(),
        }
    }

    pub fn backing(&self) -> &Backing {
        &self.backing
    }

    pub fn is_graph(&self) -> bool {
        matches!(*self.backing, Backing::Graph(_))
    }

    pub fn n(&self) -> usize {
        match &*self.backing {
            Backing::Graph(g) => g.n(),
            Backing::Points(p) => p.len(),
        }
    }

    pub fn budget(&self) -> Budget {
        Budget {
            distance_evals: self.counters.distance_evals.load(AtomicOrdering::Relaxed),
            sssp_calls: self.counters.sssp_calls.load(AtomicOrdering::Relaxed),
        }
    }

    fn charge(&self, evals: u64, sssp: u64) {
        if evals > 0 {
            self.counters
                .distance_evals
                .fetch_add(evals, AtomicOrdering::Relaxed);
        }
        if sssp > 0 {
            self.counters.sssp_calls.fetch_add(sssp, AtomicOrdering::Relaxed);
        }
    }

    pub(crate) fn check(&self, node: usize) -> Result<()> {
        let n = self.n();
        if node < n {
            Ok(())
        } else {
            Err(Error::InvalidNode { node, n })
        }
    }

    /// Exact distance between two elements. A graph backing runs a
    /// (truncated) Dijkstra from the smaller id, so the result is bitwise
    /// symmetric, and charges one SSSP call.
    pub fn distance(&self, u: usize, v: usize) -> Result<f64> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Ok(0.0);
        }
        match &*self.backing {
            Backing::Graph(g) => {
                self.charge(1, 1);
                let (a, b) = (u.min(v), u.max(v));
                let d = g.dijkstra(a, Some(b))[b];
                if d.is_finite() {
                    Ok(d)
                } else {
                    Err(Error::UnreachablePair { u, v })
                }
            }
            Backing::Points(p) => {
                self.charge(1, 0);
                Ok(p.raw_distance(u, v))
            }
        }
    }

    /// Distance from an arbitrary Euclidean point (not necessarily in the set)
    /// to element `v`.
    pub fn distance_to_point(&self, point: &[f64], v: usize) -> Result<f64> {
        self.check(v)?;
        match &*self.backing {
            Backing::Points(PointSet::Euclidean { dim, coords }) if *dim == point.len() => {
                self.charge(1, 0);
                Ok(euclidean(point, &coords[v * dim..(v + 1) * dim]))
            }
            _ => Err(Error::UnsupportedQuery),
        }
    }

    /// Exact distances from `s` to every element.
    pub fn single_source(&self, s: usize) -> Result<DistanceVector> {
        self.check(s)?;
        let n = self.n();
        let d = match &*self.backing {
            Backing::Graph(g) => {
                let d = g.dijkstra(s, None);
                if let Some(node) = d.iter().position(|x| !x.is_finite()) {
                    self.charge(0, 1);
                    return Err(Error::DisconnectedGraph { from: s, node });
                }
                d
            }
            Backing::Points(p) => (0..n).map(|v| p.raw_distance(s, v)).collect(),
        };
        self.charge(n.saturating_sub(1) as u64, 1);
        let sum = d.iter().sum();
        Ok(DistanceVector { source: s, d, sum })
    }

    /// Runs `single_source` for every entry of `sources` and hands the results
    /// to `visit` in source order. Sources are resolved in parallel, a bounded
    /// chunk at a time, so `visit` sees a deterministic sequence.
    pub fn scan_sources<F>(&self, sources: &[usize], mut visit: F) -> Result<()>
    where
        F: FnMut(usize, &DistanceVector),
    {
        const CHUNK: usize = 64;
        let mut position = 0;
        for chunk in sources.chunks(CHUNK) {
            let rows: Vec<DistanceVector> = chunk
                .par_iter()
                .map(|&s| self.single_source(s))
                .collect::<Result<_>>()?;
            for row in &rows {
                visit(position, row);
                position += 1;
            }
        }
        Ok(())
    }

    /// Content hash of the backing data; equal spaces hash equally.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        match &*self.backing {
            Backing::Graph(g) => {
                0u8.hash(&mut h);
                g.n.hash(&mut h);
                for &(u, v, w) in &g.edges {
                    (u, v, w.to_bits()).hash(&mut h);
                }
            }
            Backing::Points(PointSet::Euclidean { dim, coords }) => {
                1u8.hash(&mut h);
                dim.hash(&mut h);
                coords.iter().for_each(|c| c.to_bits().hash(&mut h));
            }
            Backing::Points(PointSet::Matrix { n, d }) => {
                2u8.hash(&mut h);
                n.hash(&mut h);
                d.iter().for_each(|c| c.to_bits().hash(&mut h));
            }
        }
        h.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn p3() -> DistanceSpace {
        Graph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap().into()
    }

    fn star() -> DistanceSpace {
        Graph::new(4, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)])
            .unwrap()
            .into()
    }

    #[test]
    fn path_distances() {
        let s = p3();
        assert_eq!(s.distance(0, 2).unwrap(), 2.0);
        assert_eq!(s.distance(1, 1).unwrap(), 0.0);
        let dv = s.single_source(1).unwrap();
        assert_eq!(dv.d, vec![1.0, 0.0, 1.0]);
        assert_eq!(dv.sum, 2.0);
    }

    #[test]
    fn star_sums() {
        let s = star();
        assert_eq!(s.single_source(0).unwrap().sum, 3.0);
        assert_eq!(s.single_source(2).unwrap().sum, 5.0);
    }

    #[test]
    fn euclidean_345() {
        let s: DistanceSpace = PointSet::euclidean(2, vec![0.0, 0.0, 3.0, 4.0])
            .unwrap()
            .into();
        assert_eq!(s.distance(0, 1).unwrap(), 5.0);
        assert_eq!(s.distance_to_point(&[0.0, 4.0], 1).unwrap(), 3.0);
    }

    #[test]
    fn parallel_edges_and_self_loops() {
        let g = Graph::new(2, [(0, 1, 2.0), (1, 0, 1.0), (1, 1, 0.5)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1, 1.0)]);
    }

    #[test]
    fn disconnected_is_lazy() {
        let s: DistanceSpace = Graph::new(3, [(0, 1, 1.0)]).unwrap().into();
        assert_eq!(s.distance(0, 1).unwrap(), 1.0);
        assert_eq!(
            s.distance(0, 2),
            Err(Error::UnreachablePair { u: 0, v: 2 })
        );
        assert_eq!(
            s.single_source(0),
            Err(Error::DisconnectedGraph { from: 0, node: 2 })
        );
    }

    #[test]
    fn invalid_node() {
        assert!(matches!(
            p3().distance(0, 3),
            Err(Error::InvalidNode { node: 3, n: 3 })
        ));
    }

    #[test]
    fn point_set_counter_charges_n_minus_one() {
        let s: DistanceSpace = PointSet::euclidean(1, (0..10).map(f64::from).collect())
            .unwrap()
            .into();
        s.single_source(3).unwrap();
        assert_eq!(s.budget().distance_evals, 9);
        s.single_source(4).unwrap();
        assert_eq!(s.budget().distance_evals, 18);
        s.distance(0, 0).unwrap();
        s.distance(0, 1).unwrap();
        assert_eq!(
            s.budget(),
            Budget {
                distance_evals: 19,
                sssp_calls: 2
            }
        );
        assert_eq!(s.fork().budget(), Budget::default());
    }

    #[test]
    fn matrix_validation() {
        let bad = PointSet::from_matrix(3, vec![0.0, 1.0, 10.0, 1.0, 0.0, 1.0, 10.0, 1.0, 0.0]);
        assert!(matches!(bad, Err(Error::NotAMetric { .. })));
        let asym = PointSet::from_matrix(2, vec![0.0, 1.0, 2.0, 0.0]);
        assert!(matches!(asym, Err(Error::InvalidParameter(_))));
        let zeros = PointSet::from_matrix(3, vec![0.0; 9]);
        assert!(zeros.is_ok());
    }

    #[test]
    fn fingerprint_tracks_content() {
        let a = p3();
        let b = p3();
        assert_eq!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint(), a.fork().fingerprint());
        assert_ne!(a.fingerprint(), star().fingerprint());
    }
}
