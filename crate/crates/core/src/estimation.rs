//! Inverse-probability estimates of distance sums, closeness centrality and
//! the approximate 1-median.

use crate::error::{Error, Result};
use crate::sampling::WeightedSample;
use crate::space::{Backing, DistanceSpace};

/// A query for [`estimate_point`]: an element of the space, or (for
/// Euclidean point sets) arbitrary coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Query<'a> {
    Node(usize),
    Point(&'a [f64]),
}

/// Ŵ(z) = Σ_{u∈S} dist(z,u)/p_u. Unbiased for W(z).
///
/// Point-set backings evaluate exactly |S| distances; a graph node query
/// runs one single-source computation from `z` instead.
pub fn estimate_point(space: &DistanceSpace, sample: &WeightedSample, query: Query<'_>) -> Result<f64> {
    if sample.is_empty() {
        return Ok(0.0);
    }
    match (query, space.backing()) {
        (Query::Node(z), Backing::Graph(_)) => {
            let row = space.single_source(z)?;
            Ok(sample.entries.iter().map(|&(u, p)| row.d[u] / p).sum())
        }
        (Query::Node(z), Backing::Points(_)) => sample
            .entries
            .iter()
            .map(|&(u, p)| space.distance(z, u).map(|d| d / p))
            .sum(),
        (Query::Point(x), _) => sample
            .entries
            .iter()
            .map(|&(u, p)| space.distance_to_point(x, u).map(|d| d / p))
            .sum(),
    }
}

/// Per-node distance-sum estimates Ŵ(v).
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateVector {
    pub w_hat: Vec<f64>,
}

impl EstimateVector {
    pub fn len(&self) -> usize {
        self.w_hat.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w_hat.is_empty()
    }
}

/// Estimates for every node with one single-source computation per sampled
/// node. Contributions are accumulated in sample order.
pub fn estimate_all_nodes(space: &DistanceSpace, sample: &WeightedSample) -> Result<EstimateVector> {
    let n = space.n();
    if sample.n != n {
        return Err(Error::InvalidParameter(format!(
            "sample drawn over {} elements, space has {n}",
            sample.n
        )));
    }
    let mut w_hat = vec![0.0; n];
    let sources = sample.nodes();
    space.scan_sources(&sources, |i, row| {
        let p = sample.entries[i].1;
        for (w, d) in w_hat.iter_mut().zip(&row.d) {
            *w += d / p;
        }
    })?;
    Ok(EstimateVector { w_hat })
}

/// Closeness centralities; `f64::INFINITY` marks a zero distance sum.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralityVector {
    pub cc: Vec<f64>,
}

/// cc(v) = (n−1)/Ŵ(v).
pub fn closeness(estimates: &EstimateVector) -> CentralityVector {
    let scale = estimates.len().saturating_sub(1) as f64;
    CentralityVector {
        cc: estimates
            .w_hat
            .iter()
            .map(|&w| if w == 0.0 { f64::INFINITY } else { scale / w })
            .collect(),
    }
}

/// Node with the smallest estimated distance sum; ties go to the lowest id.
pub fn approx_median(estimates: &EstimateVector) -> Result<usize> {
    estimates
        .w_hat
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
        .map(|(v, _)| v)
        .ok_or_else(|| Error::InvalidParameter("no estimates".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{build_sample, BasePolicy};
    use crate::space::{Graph, PointSet};

    fn p3() -> DistanceSpace {
        Graph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap().into()
    }

    fn sample(n: usize, entries: Vec<(usize, f64)>) -> WeightedSample {
        WeightedSample {
            n,
            k: 1.0,
            seed: 0,
            entries,
        }
    }

    #[test]
    fn single_entry_point_query() {
        let s = sample(3, vec![(2, 0.5)]);
        assert_eq!(estimate_point(&p3(), &s, Query::Node(0)).unwrap(), 4.0);
        assert_eq!(
            estimate_all_nodes(&p3(), &s).unwrap().w_hat,
            vec![4.0, 2.0, 0.0]
        );
    }

    #[test]
    fn full_sample_is_exact() {
        let s = sample(3, vec![(0, 1.0), (1, 1.0), (2, 1.0)]);
        assert_eq!(estimate_all_nodes(&p3(), &s).unwrap().w_hat, vec![3.0, 2.0, 3.0]);
        for z in 0..3 {
            let w = [3.0, 2.0, 3.0][z];
            assert_eq!(estimate_point(&p3(), &s, Query::Node(z)).unwrap(), w);
        }
    }

    #[test]
    fn empty_sample_estimates_zero() {
        let s = sample(3, vec![]);
        assert_eq!(estimate_point(&p3(), &s, Query::Node(1)).unwrap(), 0.0);
    }

    #[test]
    fn point_queries_need_coordinates() {
        let s = sample(3, vec![(0, 1.0)]);
        assert_eq!(
            estimate_point(&p3(), &s, Query::Point(&[0.0])),
            Err(Error::UnsupportedQuery)
        );
        let pts: DistanceSpace = PointSet::euclidean(2, vec![0.0, 0.0, 3.0, 4.0])
            .unwrap()
            .into();
        let s = sample(2, vec![(0, 1.0), (1, 0.5)]);
        let est = estimate_point(&pts, &s, Query::Point(&[0.0, 4.0])).unwrap();
        assert_eq!(est, 4.0 + 3.0 / 0.5);
        assert_eq!(pts.budget().distance_evals, 2);
    }

    #[test]
    fn closeness_by_hand() {
        let cc = closeness(&EstimateVector {
            w_hat: vec![3.0, 5.0, 5.0, 5.0],
        });
        assert_eq!(cc.cc[0], 1.0);
        let cc = closeness(&EstimateVector {
            w_hat: vec![3.0, 2.0, 3.0],
        });
        assert_eq!(cc.cc, vec![2.0 / 3.0, 1.0, 2.0 / 3.0]);
        let cc = closeness(&EstimateVector {
            w_hat: vec![0.0, 2.0],
        });
        assert_eq!(cc.cc[0], f64::INFINITY);
    }

    #[test]
    fn median_tie_break() {
        let e = |w: Vec<f64>| EstimateVector { w_hat: w };
        assert_eq!(approx_median(&e(vec![3.0, 5.0, 5.0, 5.0])).unwrap(), 0);
        assert_eq!(approx_median(&e(vec![3.0, 2.0, 3.0])).unwrap(), 1);
        assert_eq!(approx_median(&e(vec![2.0, 2.0, 3.0])).unwrap(), 0);
        assert!(approx_median(&e(vec![])).is_err());
    }

    #[test]
    fn all_nodes_matches_point_queries() {
        let mut edges = Vec::new();
        for i in 0..40usize {
            edges.push((i, (i + 1) % 40, 1.0 + (i % 7) as f64 * 0.25));
            edges.push((i, (i * 7 + 3) % 40, 2.0 + (i % 3) as f64));
        }
        let g: DistanceSpace = Graph::new(40, edges).unwrap().into();
        let (_, s) = build_sample(&g, BasePolicy::Uniform(2), 8.0, 5).unwrap();
        let all = estimate_all_nodes(&g, &s).unwrap();
        for z in 0..40 {
            let point = estimate_point(&g, &s, Query::Node(z)).unwrap();
            assert!((all.w_hat[z] - point).abs() <= 1e-9 * point.max(1.0));
        }
    }

    #[test]
    fn all_nodes_charges_one_sssp_per_entry() {
        let g = p3();
        let s = sample(3, vec![(0, 0.5), (2, 0.25)]);
        estimate_all_nodes(&g, &s).unwrap();
        assert_eq!(g.budget().sssp_calls, 2);
    }
}
