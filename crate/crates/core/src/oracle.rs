//! Exact, brute-force ground truth. Quadratic in memory and time; meant for
//! tests and the Monte-Carlo harness, never called by the estimators.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::sampling::{kth_smallest, QuantileRank};
use crate::space::DistanceSpace;

/// Full distance matrix plus distance sums.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactTruth {
    n: usize,
    matrix: Vec<f64>,
    w: Vec<f64>,
}

/// Exact well-positioned classification for a quantile rank Q.
#[derive(Debug, Clone, PartialEq)]
pub struct WellPositioned {
    pub rank: QuantileRank,
    /// m(v) at the median rank ⌈1+n/2⌉.
    pub m_median: Vec<f64>,
    /// m_Q(v).
    pub m_rank: Vec<f64>,
    /// MinMed_Q.
    pub min_med: f64,
    /// m(v) ≤ 2·MinMed_Q.
    pub flags: Vec<bool>,
}

impl WellPositioned {
    pub fn count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    pub fn is_well_positioned(&self, v: usize) -> bool {
        self.flags[v]
    }
}

/// Outcome of the centrality-distribution checks on one instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionChecks {
    /// max_v W(v)/n ≥ D/2.
    pub high_average: bool,
    /// Every W(v)/n lies in [D/n, D].
    pub average_range: bool,
    /// At least ⌈n/2⌉ nodes have W(v) ≤ 3·W(1-median).
    pub median_spread: bool,
}

impl DistributionChecks {
    pub fn all(&self) -> bool {
        self.high_average && self.average_range && self.median_spread
    }
}

const SLACK: f64 = 1e-9;

impl ExactTruth {
    /// `n` single-source computations.
    pub fn compute(space: &DistanceSpace) -> Result<Self> {
        let n = space.n();
        let mut matrix = vec![0.0; n * n];
        let mut w = vec![0.0; n];
        let sources: Vec<usize> = (0..n).collect();
        space.scan_sources(&sources, |s, row| {
            matrix[s * n..(s + 1) * n].copy_from_slice(&row.d);
            w[s] = row.sum;
        })?;
        Ok(ExactTruth { n, matrix, w })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dist(&self, u: usize, v: usize) -> f64 {
        self.matrix[u * self.n + v]
    }

    pub fn row(&self, u: usize) -> &[f64] {
        &self.matrix[u * self.n..(u + 1) * self.n]
    }

    /// W(v) for every v.
    pub fn w(&self) -> &[f64] {
        &self.w
    }

    /// Σ_v W(v) / 2.
    pub fn aps(&self) -> f64 {
        self.w.iter().sum::<f64>() / 2.0
    }

    /// D, the largest pairwise distance.
    pub fn diameter(&self) -> f64 {
        self.matrix.iter().copied().fold(0.0, f64::max)
    }

    /// Exact 1-median (lowest id on ties).
    pub fn median_node(&self) -> usize {
        self.w
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
            .map(|(v, _)| v)
            .unwrap_or(0)
    }

    fn require_nondegenerate(&self) -> Result<()> {
        if self.w.contains(&0.0) {
            Err(Error::DegenerateMetric)
        } else {
            Ok(())
        }
    }

    /// γ̄_v = max_z dist(z,v)/W(z).
    pub fn gamma_bar(&self) -> Result<Vec<f64>> {
        self.require_nondegenerate()?;
        Ok((0..self.n)
            .map(|v| {
                (0..self.n)
                    .map(|z| self.dist(z, v) / self.w[z])
                    .fold(0.0, f64::max)
            })
            .collect())
    }

    /// m_Q(v) for every v.
    pub fn quantile_distances(&self, rank: QuantileRank) -> Vec<f64> {
        (0..self.n)
            .map(|v| kth_smallest(&mut self.row(v).to_vec(), rank.get()))
            .collect()
    }

    pub fn classify(&self, rank: QuantileRank) -> WellPositioned {
        let m_median = self.quantile_distances(QuantileRank::median(self.n));
        let m_rank = if rank == QuantileRank::median(self.n) {
            m_median.clone()
        } else {
            self.quantile_distances(rank)
        };
        let min_med = m_rank.iter().copied().fold(f64::INFINITY, f64::min);
        let flags = m_median.iter().map(|&m| m <= 2.0 * min_med).collect();
        WellPositioned {
            rank,
            m_median,
            m_rank,
            min_med,
            flags,
        }
    }

    /// min over pairs (z,v) with dist(z,v) > 0 of γ_v·W(z)/dist(z,v): the
    /// largest c for which `gamma` is approximate PPS for every z.
    pub fn pps_constant(&self, gamma: &[f64]) -> Result<f64> {
        let mut best = f64::INFINITY;
        for z in 0..self.n {
            for v in 0..self.n {
                let d = self.dist(z, v);
                if d > 0.0 {
                    best = best.min(gamma[v] * self.w[z] / d);
                }
            }
        }
        if best.is_finite() {
            Ok(best)
        } else {
            Err(Error::DegenerateMetric)
        }
    }

    pub fn distribution_checks(&self) -> DistributionChecks {
        let n = self.n as f64;
        let d = self.diameter();
        let tol = SLACK * d.max(1.0);
        let averages: Vec<f64> = self.w.iter().map(|w| w / n).collect();
        let high_average = averages.iter().copied().fold(0.0, f64::max) >= d / 2.0 - tol;
        let average_range = averages
            .iter()
            .all(|&a| a >= d / n - tol && a <= d + tol);
        let w_min = self.w[self.median_node()];
        let near = self
            .w
            .iter()
            .filter(|&&w| w <= 3.0 * w_min + SLACK * w_min.max(1.0))
            .count();
        DistributionChecks {
            high_average,
            average_range,
            median_spread: near >= self.n.div_ceil(2),
        }
    }
}

/// W(v) for every node; `n` single-source computations.
pub fn exact_w_all(space: &DistanceSpace) -> Result<Vec<f64>> {
    let n = space.n();
    let mut w = vec![0.0; n];
    let sources: Vec<usize> = (0..n).collect();
    space.scan_sources(&sources, |s, row| w[s] = row.sum)?;
    Ok(w)
}

pub fn exact_aps(space: &DistanceSpace) -> Result<f64> {
    Ok(exact_w_all(space)?.iter().sum::<f64>() / 2.0)
}

pub fn exact_gamma_bar(space: &DistanceSpace) -> Result<Vec<f64>> {
    ExactTruth::compute(space)?.gamma_bar()
}

pub fn classify_well_positioned(space: &DistanceSpace, rank: QuantileRank) -> Result<WellPositioned> {
    Ok(ExactTruth::compute(space)?.classify(rank))
}

fn cache() -> &'static Mutex<HashMap<u64, Arc<ExactTruth>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<ExactTruth>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// [`ExactTruth::compute`], memoized by [`DistanceSpace::fingerprint`].
pub fn cached(space: &DistanceSpace) -> Result<Arc<ExactTruth>> {
    let key = space.fingerprint();
    if let Some(hit) = cache().lock().unwrap().get(&key) {
        return Ok(Arc::clone(hit));
    }
    let truth = Arc::new(ExactTruth::compute(space)?);
    cache()
        .lock()
        .unwrap()
        .entry(key)
        .or_insert_with(|| Arc::clone(&truth));
    Ok(truth)
}

/// In-place Floyd–Warshall over a dense `n × n` integer length matrix.
pub fn floyd_warshall(n: usize, lengths: &mut [i64]) {
    for k in 0..n {
        for i in 0..n {
            let ik = lengths[i * n + k];
            for j in 0..n {
                let through = ik + lengths[k * n + j];
                if through < lengths[i * n + j] {
                    lengths[i * n + j] = through;
                }
            }
        }
    }
}

/// Exact all-pairs distance sum (unordered pairs) of a complete graph given
/// by its integer length matrix.
pub fn exact_aps_integer(n: usize, lengths: &[i64]) -> i64 {
    let mut dist = lengths.to_vec();
    floyd_warshall(n, &mut dist);
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| dist[i * n + j])
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{Graph, PointSet};

    fn p3() -> DistanceSpace {
        Graph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap().into()
    }

    fn star() -> DistanceSpace {
        Graph::new(4, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)])
            .unwrap()
            .into()
    }

    fn two_points(d: f64) -> DistanceSpace {
        PointSet::euclidean(1, vec![0.0, d]).unwrap().into()
    }

    #[test]
    fn sums_by_hand() {
        assert_eq!(exact_w_all(&p3()).unwrap(), vec![3.0, 2.0, 3.0]);
        assert_eq!(exact_w_all(&star()).unwrap(), vec![3.0, 5.0, 5.0, 5.0]);
        assert_eq!(exact_w_all(&two_points(5.0)).unwrap(), vec![5.0, 5.0]);
        assert_eq!(exact_aps(&p3()).unwrap(), 4.0);
        assert_eq!(exact_aps(&star()).unwrap(), 9.0);
        let triangle: DistanceSpace =
            PointSet::from_matrix(3, vec![0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0])
                .unwrap()
                .into();
        assert_eq!(exact_aps(&triangle).unwrap(), 3.0);
    }

    #[test]
    fn gamma_bar_by_hand() {
        let g = exact_gamma_bar(&p3()).unwrap();
        assert_eq!(g, vec![2.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0]);
        assert!((g.iter().sum::<f64>() - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(exact_gamma_bar(&two_points(7.0)).unwrap(), vec![1.0, 1.0]);
        let zeros: DistanceSpace = PointSet::from_matrix(3, vec![0.0; 9]).unwrap().into();
        assert_eq!(exact_gamma_bar(&zeros), Err(Error::DegenerateMetric));
    }

    #[test]
    fn classification_on_path() {
        let wp = classify_well_positioned(&p3(), QuantileRank::median(3)).unwrap();
        assert_eq!(wp.m_median, vec![2.0, 1.0, 2.0]);
        assert_eq!(wp.min_med, 1.0);
        assert_eq!(wp.flags, vec![true, true, true]);
    }

    #[test]
    fn classification_long_spoke() {
        // center 0, spokes of length 1, 1, 100; n = 4, median rank 3
        let s: DistanceSpace = Graph::new(4, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 100.0)])
            .unwrap()
            .into();
        let wp = classify_well_positioned(&s, QuantileRank::median(4)).unwrap();
        // sorted rows: 0:[0,1,1,100] 1:[0,1,2,101] 2:[0,1,2,101] 3:[0,100,101,101]
        assert_eq!(wp.m_median, vec![1.0, 2.0, 2.0, 101.0]);
        assert_eq!(wp.flags, vec![true, true, true, false]);
        assert!(wp.count() >= QuantileRank::median(4).get());
    }

    #[test]
    fn pps_constant_path() {
        let truth = ExactTruth::compute(&p3()).unwrap();
        // γ = [1/2, 1/3, 1/2]; worst pair is (z=0, v=2): (1/2)·3/2
        let c = truth.pps_constant(&[0.5, 1.0 / 3.0, 0.5]).unwrap();
        assert!((c - 0.75).abs() < 1e-15);
    }

    #[test]
    fn distribution_checks_hold_on_small_cases() {
        for space in [p3(), star(), two_points(3.0)] {
            let t = ExactTruth::compute(&space).unwrap();
            assert!(t.distribution_checks().all());
        }
    }

    #[test]
    fn cache_is_keyed_by_content() {
        let a = cached(&p3()).unwrap();
        let b = cached(&p3().fork()).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }

    #[test]
    fn integer_aps() {
        // path 0-1-2 plus a long chord 0-2
        let l = vec![0, 1, 9, 1, 0, 1, 9, 1, 0];
        assert_eq!(exact_aps_integer(3, &l), 4);
    }
}
