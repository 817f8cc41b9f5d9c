//! All-pairs distance sum estimators.
//!
//! Two routes: half the sum of the per-node estimates (one single-source
//! computation per sampled node), and pair sampling from the outer product
//! γρᵀ which needs only O(n + k) pairwise distances in a metric space.

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::estimation::EstimateVector;
use crate::sampling::{
    compute_coefficients, find_well_positioned_relaxed, multiset_from, CoefficientVector,
};
use crate::seed;
use crate::space::{Budget, DistanceSpace};

/// Pairs per ε⁻² in [`pair_sample_size`].
pub const PAIR_SAMPLE_CONSTANT: f64 = 64.0;

/// `⌈64·ε⁻²⌉` pairs.
pub fn pair_sample_size(epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    Ok((PAIR_SAMPLE_CONSTANT / (epsilon * epsilon)).ceil() as usize)
}

/// ½ Σ_z Ŵ(z).
pub fn aps_from_estimates(estimates: &EstimateVector) -> f64 {
    estimates.w_hat.iter().sum::<f64>() / 2.0
}

/// Pair-sampling distribution over the second coordinate, built from the
/// rough estimates Ŵ′(i) = n·dist(i,z) + W(z) around an anchor z.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoVector {
    pub anchor: usize,
    pub w_rough: Vec<f64>,
    pub rho: Vec<f64>,
}

/// One single-source computation from `anchor`. The anchor should be 0.6n
/// well positioned for the sandwich W(u) ≤ Ŵ′(u) ≤ 16·W(u) to hold.
pub fn compute_rho(space: &DistanceSpace, anchor: usize) -> Result<RhoVector> {
    let row = space.single_source(anchor)?;
    let n = space.n() as f64;
    let w_rough: Vec<f64> = row.d.iter().map(|d| n * d + row.sum).collect();
    let total: f64 = w_rough.iter().sum();
    if total <= 0.0 {
        return Err(Error::BadAnchor { anchor });
    }
    let rho = w_rough.iter().map(|w| w / total).collect();
    Ok(RhoVector {
        anchor,
        w_rough,
        rho,
    })
}

/// A multiset of ordered pairs `(i, j, p_ij)` with `p_ij = γ_i·ρ_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSample {
    pub k: usize,
    pub seed: u64,
    pub pairs: Vec<(usize, usize, f64)>,
}

/// `k` i.i.d. ordered pairs, `i ~ gamma`, `j ~ rho`.
///
/// Both marginals are drawn with the sorted-uniform merge; the ρ-multiset is
/// shuffled before zipping so the two coordinates are independent per slot.
pub fn sample_pairs(gamma: &[f64], rho: &RhoVector, k: usize, seed: u64) -> Result<PairSample> {
    if k == 0 {
        return Err(Error::InvalidParameter("pair sample size must be positive".into()));
    }
    if gamma.len() != rho.rho.len() {
        return Err(Error::InvalidParameter(format!(
            "gamma has {} entries, rho has {}",
            gamma.len(),
            rho.rho.len()
        )));
    }
    let mut rng = seed::rng(seed);
    let first = multiset_from(&mut rng, gamma, k)?;
    let mut second = multiset_from(&mut rng, &rho.rho, k)?;
    second.shuffle(&mut rng);
    let pairs = first
        .into_iter()
        .zip(second)
        .map(|(i, j)| (i, j, gamma[i] * rho.rho[j]))
        .collect();
    Ok(PairSample { k, seed, pairs })
}

/// (1/|S|)·Σ dist(i,j)/p_ij, halved: the pairs range over ordered V×V whose
/// distance total is 2·aps(V).
pub fn estimate_aps_pairs(space: &DistanceSpace, pairs: &PairSample) -> Result<f64> {
    if pairs.pairs.is_empty() {
        return Err(Error::InvalidParameter("empty pair sample".into()));
    }
    let mut total = 0.0;
    for &(i, j, p) in &pairs.pairs {
        total += space.distance(i, j)? / p;
    }
    Ok(total / pairs.pairs.len() as f64 / 2.0)
}

/// Everything the metric pair-sampling pipeline produced.
#[derive(Debug, Clone)]
pub struct PairsEstimate {
    pub estimate: f64,
    pub anchor: usize,
    pub coefficients: CoefficientVector,
    pub rho: RhoVector,
    pub pairs: PairSample,
    /// Resources charged to the space by this call.
    pub budget: Budget,
}

/// Relaxed well-positioned anchor, γ from that anchor, ρ around it, `k`
/// sampled pairs: at most 2n + ⌈10 ln n⌉·⌈48 ln n⌉ + k pairwise distances.
///
/// Instances below the relaxed finder's minimum size use the exact finder.
pub fn estimate_aps_metric(space: &DistanceSpace, k: usize, seed: u64) -> Result<PairsEstimate> {
    let before = space.budget();
    let anchor = match find_well_positioned_relaxed(space, seed::derive_seed(seed, 0)) {
        Ok(v) => v,
        Err(Error::InstanceTooSmall { .. }) => {
            crate::sampling::find_well_positioned(space, seed::derive_seed(seed, 0))?
        }
        Err(e) => return Err(e),
    };
    let coefficients = compute_coefficients(space, &[anchor])?;
    let rho = compute_rho(space, anchor)?;
    let pairs = sample_pairs(&coefficients.normalized(), &rho, k, seed::derive_seed(seed, 1))?;
    let estimate = estimate_aps_pairs(space, &pairs)?;
    Ok(PairsEstimate {
        estimate,
        anchor,
        coefficients,
        rho,
        pairs,
        budget: space.budget() - before,
    })
}
