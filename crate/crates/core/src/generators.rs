//! Seeded instance generators for tests, benchmarks and the harness.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::hardness::SignedGraph;
use crate::seed;
use crate::space::{euclidean, DistanceSpace, Graph, PointSet};

pub fn path(n: usize) -> Graph {
    Graph::new(n, (1..n).map(|i| (i - 1, i, 1.0))).expect("valid path")
}

pub fn star(leaves: usize) -> Graph {
    Graph::new(leaves + 1, (1..=leaves).map(|i| (0, i, 1.0))).expect("valid star")
}

pub fn clique(n: usize) -> Graph {
    Graph::new(
        n,
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v, 1.0))),
    )
    .expect("valid clique")
}

fn uniform_coords(rng: &mut seed::SeededRng, n: usize, dim: usize) -> Vec<f64> {
    (0..n * dim).map(|_| rng.random::<f64>()).collect()
}

fn is_connected(g: &Graph) -> bool {
    let n = g.n();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &(v, _) in g.neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Random geometric graph in the unit square: nodes within radius
/// √(2 ln n / (π n)) are joined by an edge of their Euclidean length.
/// Redraws (deterministically) until connected.
pub fn random_geometric(n: usize, seed: u64) -> Graph {
    let radius = (2.0 * (n.max(2) as f64).ln() / (std::f64::consts::PI * n as f64)).sqrt();
    let mut rng = seed::rng(seed);
    loop {
        let coords = uniform_coords(&mut rng, n, 2);
        let point = |i: usize| &coords[2 * i..2 * i + 2];
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                let d = euclidean(point(u), point(v));
                if d <= radius {
                    edges.push((u, v, d));
                }
            }
        }
        let g = Graph::new(n, edges).expect("valid geometric graph");
        if is_connected(&g) {
            return g;
        }
    }
}

/// Erdős–Rényi G(n, p) with U[1,2] lengths, made connected by a random
/// spanning tree laid down first.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = seed::rng(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut edges = Vec::new();
    for i in 1..n {
        let parent = order[rng.random_range(0..i)];
        edges.push((parent, order[i], 1.0 + rng.random::<f64>()));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v, 1.0 + rng.random::<f64>()));
            }
        }
    }
    Graph::new(n, edges).expect("valid random graph")
}

/// `n` uniform points in the unit cube of dimension `dim`.
pub fn uniform_cloud(n: usize, dim: usize, seed: u64) -> PointSet {
    let mut rng = seed::rng(seed);
    PointSet::euclidean(dim, uniform_coords(&mut rng, n, dim)).expect("valid cloud")
}

/// Distance of heavy-tail outliers from the cluster.
pub const HEAVY_TAIL_DISTANCE: f64 = 1000.0;

/// Tight cluster of `n − outliers` points in a 0.01-square at the origin
/// plus `outliers` points scattered around distance 1000.
pub fn heavy_tail(n: usize, outliers: usize, seed: u64) -> PointSet {
    let outliers = outliers.min(n);
    let mut rng = seed::rng(seed);
    let mut coords = Vec::with_capacity(2 * n);
    for _ in 0..n - outliers {
        coords.push(0.01 * rng.random::<f64>());
        coords.push(0.01 * rng.random::<f64>());
    }
    for _ in 0..outliers {
        let angle = rng.random::<f64>() * std::f64::consts::TAU;
        let r = HEAVY_TAIL_DISTANCE * (1.0 + 0.1 * rng.random::<f64>());
        coords.push(r * angle.cos());
        coords.push(r * angle.sin());
    }
    PointSet::euclidean(2, coords).expect("valid heavy-tail set")
}

/// Random signed graph: each pair is an edge with probability `density`,
/// weights uniform in [−bound, bound].
pub fn random_signed(n: usize, density: f64, bound: i64, seed: u64) -> SignedGraph {
    let mut rng = seed::rng(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < density {
                edges.push((u, v, rng.random_range(-bound..=bound)));
            }
        }
    }
    SignedGraph::new(n, bound, edges).expect("valid signed graph")
}

/// `count` mixed instances (graphs and point sets) with 9 ≤ n ≤ `max_n`,
/// cycling through the built-in families.
pub fn corpus(count: usize, max_n: usize, seed: u64) -> Vec<(Instance, DistanceSpace)> {
    let mut rng = seed::rng(seed);
    (0..count)
        .map(|i| {
            let n = rng.random_range(9..=max_n.max(9));
            let instance = match i % 6 {
                0 => Instance::Geometric(n),
                1 => Instance::ErdosRenyi(n, 4.0 / n as f64),
                2 => Instance::Cloud(n, 2),
                3 => Instance::Cloud(n, 3),
                4 => Instance::HeavyTail(n, 1 + n / 50),
                _ => Instance::Star(n - 1),
            };
            let space = instance.build(seed::derive_seed(seed, i as u64));
            (instance, space)
        })
        .collect()
}

/// A named, seeded instance family, e.g. `rgg:200` or `er:100:0.05`.
#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Path(usize),
    Star(usize),
    Clique(usize),
    Geometric(usize),
    ErdosRenyi(usize, f64),
    HeavyTail(usize, usize),
    Cloud(usize, usize),
}

impl Instance {
    pub fn build(&self, seed: u64) -> DistanceSpace {
        match *self {
            Instance::Path(n) => path(n).into(),
            Instance::Star(leaves) => star(leaves).into(),
            Instance::Clique(n) => clique(n).into(),
            Instance::Geometric(n) => random_geometric(n, seed).into(),
            Instance::ErdosRenyi(n, p) => erdos_renyi(n, p, seed).into(),
            Instance::HeavyTail(n, k) => heavy_tail(n, k, seed).into(),
            Instance::Cloud(n, dim) => uniform_cloud(n, dim, seed).into(),
        }
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instance::Path(n) => write!(f, "path:{n}"),
            Instance::Star(l) => write!(f, "star:{l}"),
            Instance::Clique(n) => write!(f, "clique:{n}"),
            Instance::Geometric(n) => write!(f, "rgg:{n}"),
            Instance::ErdosRenyi(n, p) => write!(f, "er:{n}:{p}"),
            Instance::HeavyTail(n, k) => write!(f, "heavy:{n}:{k}"),
            Instance::Cloud(n, d) => write!(f, "cloud:{n}:{d}"),
        }
    }
}

impl FromStr for Instance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::InvalidParameter(format!(
                "instance `{s}`: expected path:N, star:L, clique:N, rgg:N, er:N:P, heavy:N[:K] or cloud:N[:D]"
            ))
        };
        let parts: Vec<&str> = s.split(':').collect();
        let int = |i: usize| -> Result<usize> {
            parts.get(i).and_then(|p| p.parse().ok()).ok_or_else(bad)
        };
        let int_or = |i: usize, default: usize| -> Result<usize> {
            if parts.len() > i {
                int(i)
            } else {
                Ok(default)
            }
        };
        let instance = match parts[0] {
            "path" => Instance::Path(int(1)?),
            "star" => Instance::Star(int(1)?),
            "clique" => Instance::Clique(int(1)?),
            "rgg" => Instance::Geometric(int(1)?),
            "er" => {
                let p: f64 = parts.get(2).and_then(|p| p.parse().ok()).ok_or_else(bad)?;
                Instance::ErdosRenyi(int(1)?, p)
            }
            "heavy" => Instance::HeavyTail(int(1)?, int_or(2, 1)?),
            "cloud" => Instance::Cloud(int(1)?, int_or(2, 2)?),
            _ => return Err(bad()),
        };
        Ok(instance)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_graphs_are_connected() {
        for seed in 0..5 {
            assert!(is_connected(&random_geometric(150, seed)));
            assert!(is_connected(&erdos_renyi(80, 0.02, seed)));
        }
        assert!(!is_connected(&Graph::new(3, [(0, 1, 1.0)]).unwrap()));
    }

    #[test]
    fn generators_are_seeded() {
        assert_eq!(random_geometric(60, 3), random_geometric(60, 3));
        assert_ne!(uniform_cloud(10, 2, 1), uniform_cloud(10, 2, 2));
    }

    #[test]
    fn small_families() {
        assert_eq!(path(3).edges().len(), 2);
        assert_eq!(star(3).n(), 4);
        assert_eq!(clique(5).edges().len(), 10);
        let h = heavy_tail(20, 1, 0);
        assert_eq!(h.len(), 20);
    }

    #[test]
    fn instance_names_round_trip() {
        for name in ["path:3", "star:4", "clique:6", "rgg:200", "er:100:0.05", "heavy:200:1", "cloud:200:2"] {
            let inst: Instance = name.parse().unwrap();
            assert_eq!(inst.to_string(), name);
        }
        assert_eq!("cloud:50".parse::<Instance>().unwrap(), Instance::Cloud(50, 2));
        assert!("torus:5".parse::<Instance>().is_err());
        assert!("rgg".parse::<Instance>().is_err());
    }

    #[test]
    fn corpus_sizes_and_determinism() {
        let a = corpus(12, 40, 5);
        assert_eq!(a.len(), 12);
        assert!(a.iter().all(|(_, s)| (9..=40).contains(&s.n())));
        assert!(a.iter().any(|(_, s)| s.is_graph()) && a.iter().any(|(_, s)| !s.is_graph()));
        let b = corpus(12, 40, 5);
        for ((ia, sa), (ib, sb)) in a.iter().zip(&b) {
            assert_eq!(ia, ib);
            assert_eq!(sa.fingerprint(), sb.fingerprint());
        }
    }

    #[test]
    fn signed_graph_respects_bound() {
        let g = random_signed(12, 0.7, 10, 3);
        assert!(g.edges().iter().all(|e| e.2.abs() <= 10));
        assert_eq!(random_signed(12, 1.0, 4, 0).edges().len(), 66);
    }
}
