//! Universal PPS coefficients, Poisson samples, well-positioned base nodes,
//! and linear-time multinomial draws from sorted uniforms.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::seed::{self, SeededRng};
use crate::space::DistanceSpace;

/// Candidate-set multiplier: `⌈c₁ ln n⌉` uniform candidates.
pub const CANDIDATE_MULTIPLIER: f64 = 10.0;
/// Per-candidate sample multiplier for the relaxed finder: `⌈c₂ ln n⌉` draws.
pub const QUANTILE_SAMPLE_MULTIPLIER: f64 = 48.0;
/// Quantile of the per-candidate sample used by the relaxed finder.
pub const SAMPLE_QUANTILE: f64 = 0.55;
/// Smallest instance the relaxed finder accepts.
pub const RELAXED_MIN_N: usize = 20;

/// Sampling coefficients γ together with the base set that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    gamma: Vec<f64>,
    base_set: Vec<usize>,
}

impl CoefficientVector {
    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn base_set(&self) -> &[usize] {
        &self.base_set
    }

    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.gamma.iter().sum()
    }

    /// γ scaled to a probability vector.
    pub fn normalized(&self) -> Vec<f64> {
        let total = self.sum();
        self.gamma.iter().map(|g| g / total).collect()
    }
}

/// γ_v = max(1/n, max_{u ∈ S0} dist(u,v)/W(u)).
///
/// Runs exactly `|S0|` single-source computations. A base node with W(u) = 0
/// (every element coincides with it) contributes nothing beyond the 1/n floor.
pub fn compute_coefficients(space: &DistanceSpace, base_set: &[usize]) -> Result<CoefficientVector> {
    if base_set.is_empty() {
        return Err(Error::InvalidParameter("base set must be nonempty".into()));
    }
    for &u in base_set {
        space.check(u)?;
    }
    let n = space.n();
    let mut gamma = vec![1.0 / n as f64; n];
    space.scan_sources(base_set, |_, row| {
        if row.sum > 0.0 {
            for (g, d) in gamma.iter_mut().zip(&row.d) {
                *g = g.max(d / row.sum);
            }
        }
    })?;
    Ok(CoefficientVector {
        gamma,
        base_set: base_set.to_vec(),
    })
}

/// A Poisson (independent Bernoulli) sample with recorded inclusion
/// probabilities `p_v = min(1, k·γ_v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSample {
    /// Number of elements in the space the sample was drawn from.
    pub n: usize,
    pub k: f64,
    pub seed: u64,
    /// `(v, p_v)` in increasing `v`.
    pub entries: Vec<(usize, f64)>,
}

impl WeightedSample {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nodes(&self) -> Vec<usize> {
        self.entries.iter().map(|&(v, _)| v).collect()
    }
}

pub fn inclusion_probability(gamma: f64, k: f64) -> f64 {
    let p = k * gamma;
    if p >= 1.0 {
        1.0
    } else {
        p
    }
}

pub fn draw_sample(coeffs: &CoefficientVector, k: f64, seed: u64) -> Result<WeightedSample> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidParameter(format!("k must be positive, got {k}")));
    }
    let mut rng = seed::rng(seed);
    let entries = coeffs
        .gamma
        .iter()
        .enumerate()
        .filter_map(|(v, &g)| {
            let p = inclusion_probability(g, k);
            // draw for every node so the stream position never depends on p
            let r: f64 = rng.random();
            (r < p).then_some((v, p))
        })
        .collect();
    Ok(WeightedSample {
        n: coeffs.len(),
        k,
        seed,
        entries,
    })
}

/// How the sample-size parameter `k` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleSize {
    Fixed(f64),
    /// `k = ⌈ε⁻²⌉`: per-query coefficient of variation O(ε).
    PerQuery { epsilon: f64 },
    /// `k = ⌈ε⁻² ln n⌉`: relative error ε with high probability.
    HighProbability { epsilon: f64 },
}

impl SampleSize {
    pub fn resolve(self, n: usize) -> Result<f64> {
        let check = |eps: f64| {
            if eps > 0.0 && eps.is_finite() {
                Ok(eps)
            } else {
                Err(Error::InvalidParameter(format!("epsilon must be positive, got {eps}")))
            }
        };
        let k = match self {
            SampleSize::Fixed(k) => k,
            SampleSize::PerQuery { epsilon } => check(epsilon)?.powi(-2).ceil(),
            SampleSize::HighProbability { epsilon } => {
                (check(epsilon)?.powi(-2) * (n.max(2) as f64).ln()).ceil()
            }
        };
        if k > 0.0 && k.is_finite() {
            Ok(k)
        } else {
            Err(Error::InvalidParameter(format!("k must be positive, got {k}")))
        }
    }
}

/// A 1-based rank into the sorted distance row of an element (the element
/// itself sits at rank 1, distance 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct QuantileRank(usize);

impl QuantileRank {
    pub fn new(rank: usize, n: usize) -> Result<Self> {
        if rank == 0 || rank > n {
            return Err(Error::InvalidParameter(format!(
                "rank {rank} outside 1..={n}"
            )));
        }
        Ok(QuantileRank(rank))
    }

    /// `⌈1 + n/2⌉`, capped at `n`.
    pub fn median(n: usize) -> Self {
        QuantileRank((1 + n.div_ceil(2)).min(n.max(1)))
    }

    /// `⌈0.6 n⌉`, never below the median rank.
    pub fn relaxed(n: usize) -> Self {
        QuantileRank((3 * n).div_ceil(5).max(Self::median(n).0))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

/// `rank`-th smallest value (1-based); reorders `values`.
pub(crate) fn kth_smallest(values: &mut [f64], rank: usize) -> f64 {
    let (_, x, _) = values.select_nth_unstable_by(rank - 1, f64::total_cmp);
    *x
}

/// m_Q(u): distance from `u` to its Q-th closest element.
pub fn median_distance(space: &DistanceSpace, u: usize, rank: QuantileRank) -> Result<f64> {
    if rank.0 > space.n() {
        return Err(Error::InvalidParameter(format!(
            "rank {} exceeds n = {}",
            rank.0,
            space.n()
        )));
    }
    let mut row = space.single_source(u)?.d;
    Ok(kth_smallest(&mut row, rank.0))
}

fn candidate_count(n: usize) -> usize {
    ((CANDIDATE_MULTIPLIER * (n as f64).ln()).ceil() as usize).clamp(1, n)
}

fn quantile_sample_size(n: usize) -> usize {
    ((QUANTILE_SAMPLE_MULTIPLIER * (n as f64).ln()).ceil() as usize).max(1)
}

/// Upper bound on pairwise evaluations made by [`find_well_positioned_relaxed`].
pub fn relaxed_budget(n: usize) -> u64 {
    let n = n.max(2) as f64;
    ((CANDIDATE_MULTIPLIER * n.ln()).ceil() * (QUANTILE_SAMPLE_MULTIPLIER * n.ln()).ceil()) as u64
}

fn argmin_lowest_id(scored: impl IntoIterator<Item = (usize, f64)>) -> Option<usize> {
    scored
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .map(|(v, _)| v)
}

fn uniform_candidates(rng: &mut SeededRng, n: usize, count: usize) -> Vec<usize> {
    index::sample(rng, n, count).into_vec()
}

/// Returns the candidate with the smallest median distance among
/// `⌈10 ln n⌉` uniform candidates; well positioned with high probability.
pub fn find_well_positioned(space: &DistanceSpace, seed: u64) -> Result<usize> {
    let n = space.n();
    if n == 0 {
        return Err(Error::InstanceTooSmall { n, required: 1 });
    }
    if n == 1 {
        return Ok(0);
    }
    let mut rng = seed::rng(seed);
    let candidates = uniform_candidates(&mut rng, n, candidate_count(n));
    let rank = QuantileRank::median(n);
    let mut scored = Vec::with_capacity(candidates.len());
    space.scan_sources(&candidates, |i, row| {
        let mut d = row.d.clone();
        scored.push((candidates[i], kth_smallest(&mut d, rank.0)));
    })?;
    Ok(argmin_lowest_id(scored).expect("candidate set is nonempty"))
}

/// Relaxed finder using `O(log² n)` pairwise distances: for each of
/// `⌈10 ln n⌉` candidates, estimate the 0.55 quantile of its distance row from
/// `⌈48 ln n⌉` uniform draws and return the candidate with the smallest one.
pub fn find_well_positioned_relaxed(space: &DistanceSpace, seed: u64) -> Result<usize> {
    let n = space.n();
    if n < RELAXED_MIN_N {
        return Err(Error::InstanceTooSmall {
            n,
            required: RELAXED_MIN_N,
        });
    }
    let mut rng = seed::rng(seed);
    let candidates = uniform_candidates(&mut rng, n, candidate_count(n));
    let draws = quantile_sample_size(n);
    let rank = ((SAMPLE_QUANTILE * draws as f64).ceil() as usize).clamp(1, draws);

    let mut scored = Vec::with_capacity(candidates.len());
    let mut row = Vec::with_capacity(draws);
    for &v in &candidates {
        row.clear();
        for _ in 0..draws {
            let u = rng.random_range(0..n);
            row.push(space.distance(v, u)?);
        }
        scored.push((v, kth_smallest(&mut row, rank)));
    }
    Ok(argmin_lowest_id(scored).expect("candidate set is nonempty"))
}

/// Policy for choosing the base set S0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasePolicy {
    /// `b` nodes uniformly without replacement.
    Uniform(usize),
    /// One node from [`find_well_positioned`].
    WellPositioned,
    /// One node from [`find_well_positioned_relaxed`], falling back to
    /// [`find_well_positioned`] on instances below [`RELAXED_MIN_N`].
    RelaxedWellPositioned,
}

impl fmt::Display for BasePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasePolicy::Uniform(b) => write!(f, "uniform:{b}"),
            BasePolicy::WellPositioned => f.write_str("wp"),
            BasePolicy::RelaxedWellPositioned => f.write_str("relaxed-wp"),
        }
    }
}

impl FromStr for BasePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wp" => Ok(BasePolicy::WellPositioned),
            "relaxed-wp" => Ok(BasePolicy::RelaxedWellPositioned),
            _ => {
                let b = s
                    .strip_prefix("uniform:")
                    .and_then(|b| b.parse::<usize>().ok())
                    .filter(|&b| b > 0)
                    .ok_or_else(|| {
                        Error::InvalidParameter(format!(
                            "base policy `{s}`: expected uniform:<b>, wp or relaxed-wp"
                        ))
                    })?;
                Ok(BasePolicy::Uniform(b))
            }
        }
    }
}

pub fn choose_base_set(space: &DistanceSpace, policy: BasePolicy, seed: u64) -> Result<Vec<usize>> {
    let n = space.n();
    match policy {
        BasePolicy::Uniform(b) => {
            if b > n {
                return Err(Error::InvalidParameter(format!(
                    "base set of {b} nodes from {n} elements"
                )));
            }
            let mut rng = seed::rng(seed);
            let mut base = uniform_candidates(&mut rng, n, b);
            base.sort_unstable();
            Ok(base)
        }
        BasePolicy::WellPositioned => Ok(vec![find_well_positioned(space, seed)?]),
        BasePolicy::RelaxedWellPositioned => match find_well_positioned_relaxed(space, seed) {
            Ok(u) => Ok(vec![u]),
            Err(Error::InstanceTooSmall { .. }) => Ok(vec![find_well_positioned(space, seed)?]),
            Err(e) => Err(e),
        },
    }
}

/// End to end: base set, coefficients, Poisson sample. The
/// returned sample records `seed` itself, not the derived draw seed.
pub fn build_sample(
    space: &DistanceSpace,
    policy: BasePolicy,
    k: f64,
    seed: u64,
) -> Result<(CoefficientVector, WeightedSample)> {
    let base = choose_base_set(space, policy, seed::derive_seed(seed, 0))?;
    let coeffs = compute_coefficients(space, &base)?;
    let mut sample = draw_sample(&coeffs, k, seed::derive_seed(seed, 1))?;
    sample.seed = seed;
    Ok((coeffs, sample))
}

pub(crate) fn sorted_uniforms(rng: &mut SeededRng, k: usize) -> Vec<f64> {
    const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;
    let mut acc = 0.0f64;
    (0..k)
        .map(|i| {
            // 1 - U lies in (0, 1], so the log is finite
            let u: f64 = 1.0 - rng.random::<f64>();
            acc += -u.ln() / (k - i) as f64;
            (-(-acc).exp_m1()).min(BELOW_ONE)
        })
        .collect()
}

/// `k` sorted values distributed as the order statistics of `k` i.i.d.
/// U[0,1) draws, via exponential spacings in O(k).
pub fn sorted_uniform_draws(k: usize, seed: u64) -> Vec<f64> {
    sorted_uniforms(&mut seed::rng(seed), k)
}

/// Tolerance on Σ probs in [`draw_multiset`].
pub const DISTRIBUTION_TOLERANCE: f64 = 1e-9;

fn check_distribution(probs: &[f64]) -> Result<()> {
    let sum: f64 = probs.iter().sum();
    if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0))
        || (sum - 1.0).abs() > DISTRIBUTION_TOLERANCE
    {
        return Err(Error::BadDistribution { sum });
    }
    Ok(())
}

pub(crate) fn multiset_from(rng: &mut SeededRng, probs: &[f64], k: usize) -> Result<Vec<usize>> {
    check_distribution(probs)?;
    let last_positive = probs
        .iter()
        .rposition(|&p| p > 0.0)
        .ok_or(Error::BadDistribution { sum: 0.0 })?;
    let draws = sorted_uniforms(rng, k);
    let mut out = Vec::with_capacity(k);
    let mut i = 0;
    let mut upper = probs[0];
    for x in draws {
        while x >= upper && i < last_positive {
            i += 1;
            upper += probs[i];
        }
        out.push(i);
    }
    Ok(out)
}

/// `k` independent draws with replacement from `probs`, returned in
/// nondecreasing id order. One merge pass of sorted uniforms against the
/// prefix sums: O(n + k).
pub fn draw_multiset(probs: &[f64], k: usize, seed: u64) -> Result<Vec<usize>> {
    multiset_from(&mut seed::rng(seed), probs, k)
}
