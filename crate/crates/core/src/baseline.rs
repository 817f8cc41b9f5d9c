//! Uniform-sampling baseline: scaled sample sums and the sample 1-median.

use rand::seq::index;

use crate::error::{Error, Result};
use crate::seed;
use crate::space::{Backing, DistanceSpace};

/// Exponent constant of the ordering bound Pr[W_Q(u) > W_Q(v)] ≤ exp(−ε²|Q|/64).
pub const ORDERING_CONSTANT: f64 = 64.0;

/// (n/|Q|)·Σ_{a∈Q} dist(z,a).
pub fn uniform_estimate_w(space: &DistanceSpace, sample: &[usize], z: usize) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::InvalidParameter("uniform sample must be nonempty".into()));
    }
    let sum: f64 = match space.backing() {
        Backing::Graph(_) => {
            let row = space.single_source(z)?;
            sample.iter().map(|&a| row.d[a]).sum()
        }
        Backing::Points(_) => sample
            .iter()
            .map(|&a| space.distance(z, a))
            .sum::<Result<f64>>()?,
    };
    Ok(space.n() as f64 / sample.len() as f64 * sum)
}

/// W_Q(v) = Σ_{a∈Q} dist(v,a) for every v, via |Q| single-source computations.
pub fn sample_sums(space: &DistanceSpace, sample: &[usize]) -> Result<Vec<f64>> {
    let mut sums = vec![0.0; space.n()];
    space.scan_sources(sample, |_, row| {
        for (s, d) in sums.iter_mut().zip(&row.d) {
            *s += d;
        }
    })?;
    Ok(sums)
}

/// `⌈64·ε⁻²·ln(n/δ)⌉`, capped at `n`.
pub fn uniform_sample_size(n: usize, epsilon: f64, delta: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < epsilon, delta < 1 (got {epsilon}, {delta})"
        )));
    }
    let size = (ORDERING_CONSTANT / (epsilon * epsilon) * (n as f64 / delta).ln()).ceil();
    Ok((size as usize).clamp(1, n.max(1)))
}

/// Uniform subset of `size` elements, sorted.
pub fn uniform_subset(n: usize, size: usize, seed: u64) -> Vec<usize> {
    let mut q = index::sample(&mut seed::rng(seed), n, size.min(n)).into_vec();
    q.sort_unstable();
    q
}

/// 1-median with respect to a uniform subset of the given size (lowest id on
/// ties).
pub fn sample_median(space: &DistanceSpace, size: usize, seed: u64) -> Result<usize> {
    if space.n() == 0 {
        return Err(Error::InstanceTooSmall { n: 0, required: 1 });
    }
    let q = uniform_subset(space.n(), size.max(1), seed);
    let sums = sample_sums(space, &q)?;
    Ok(sums
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
        .map(|(v, _)| v)
        .expect("nonempty"))
}

/// (1+ε)-approximate 1-median with probability ≥ 1−δ.
pub fn uniform_median(space: &DistanceSpace, epsilon: f64, delta: f64, seed: u64) -> Result<usize> {
    let size = uniform_sample_size(space.n(), epsilon, delta)?;
    sample_median(space, size, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{Graph, PointSet};

    fn p3() -> DistanceSpace {
        Graph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap().into()
    }

    #[test]
    fn full_sample_is_exact() {
        let s = p3();
        for (z, w) in [(0, 3.0), (1, 2.0), (2, 3.0)] {
            assert_eq!(uniform_estimate_w(&s, &[0, 1, 2], z).unwrap(), w);
        }
    }

    #[test]
    fn skewed_single_sample() {
        assert_eq!(uniform_estimate_w(&p3(), &[0], 2).unwrap(), 6.0);
        assert!(uniform_estimate_w(&p3(), &[], 2).is_err());
    }

    #[test]
    fn star_median() {
        let s: DistanceSpace = Graph::new(4, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)])
            .unwrap()
            .into();
        assert_eq!(uniform_median(&s, 0.25, 0.05, 1).unwrap(), 0);
    }

    #[test]
    fn two_nodes() {
        let s: DistanceSpace = PointSet::euclidean(1, vec![0.0, 2.0]).unwrap().into();
        assert!(uniform_median(&s, 0.5, 0.1, 3).unwrap() < 2);
    }

    #[test]
    fn sample_size_formula() {
        // 64·16·ln(4000) ≈ 8493, capped at n
        assert_eq!(uniform_sample_size(200, 0.25, 0.05).unwrap(), 200);
        let big = uniform_sample_size(1_000_000, 0.5, 0.1).unwrap();
        assert_eq!(big, (256.0 * (1e7f64).ln()).ceil() as usize);
        assert!(uniform_sample_size(10, 0.0, 0.1).is_err());
        assert!(uniform_sample_size(10, 0.1, 1.0).is_err());
    }

    #[test]
    fn heavy_tail_misses_far_point() {
        // 49 points at the origin, one at distance 1000
        let mut coords = vec![0.0; 49];
        coords.push(1000.0);
        let s: DistanceSpace = PointSet::euclidean(1, coords).unwrap().into();
        let q: Vec<usize> = (0..7).collect();
        assert_eq!(uniform_estimate_w(&s, &q, 0).unwrap(), 0.0);
    }
}
