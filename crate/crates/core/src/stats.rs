//! Seeded Monte-Carlo harness: runs an estimator many times against exact
//! truth and reports mean, variance, NRMSE and the resources consumed.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::apsum::{estimate_aps_metric, pair_sample_size};
use crate::baseline::{sample_sums, uniform_subset};
use crate::error::{Error, Result};
use crate::estimation::estimate_all_nodes;
use crate::generators::Instance;
use crate::oracle::{self, DistributionChecks, ExactTruth};
use crate::sampling::{build_sample, BasePolicy, CoefficientVector, SampleSize};
use crate::seed::derive_seed;
use crate::space::{Budget, DistanceSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Universal PPS sample, per-node inverse-probability estimates.
    Weighted,
    /// Uniform sample without replacement, scaled sample sums.
    Uniform,
    /// Pair sampling from γρᵀ; estimates the all-pairs sum only.
    Pairs,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Weighted => "weighted",
            Method::Uniform => "uniform",
            Method::Pairs => "pairs",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weighted" => Ok(Method::Weighted),
            "uniform" => Ok(Method::Uniform),
            "pairs" => Ok(Method::Pairs),
            _ => Err(Error::InvalidParameter(format!(
                "method `{s}`: expected weighted, uniform or pairs"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    /// Generated instance; `None` when the caller supplies the space.
    pub instance: Option<Instance>,
    pub instance_seed: u64,
    pub method: Method,
    pub size: SampleSize,
    pub base: BasePolicy,
    pub trials: usize,
    pub seed: u64,
    /// Report only these nodes (the all-pairs sum is always reported).
    pub probes: Option<Vec<usize>>,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            instance: None,
            instance_seed: 0,
            method: Method::Weighted,
            size: SampleSize::Fixed(100.0),
            base: BasePolicy::Uniform(2),
            trials: 100,
            seed: 0,
            probes: None,
        }
    }
}

impl TrialConfig {
    /// Parses a flat `key = value` file. Keys: instance, instance_seed,
    /// method, k, epsilon, regime (per-query | high-probability), base,
    /// trials, seed, probes (comma-separated node ids). `#` starts a comment.
    pub fn from_key_values(text: &str) -> Result<Self> {
        let mut cfg = TrialConfig::default();
        let mut k = None;
        let mut epsilon = None;
        let mut regime = "per-query".to_string();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(idx + 1, "expected key = value"))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| Error::parse(idx + 1, format!("bad {what} `{value}`"));
            match key {
                "instance" => cfg.instance = Some(value.parse()?),
                "instance_seed" => cfg.instance_seed = value.parse().map_err(|_| bad(key))?,
                "method" => cfg.method = value.parse()?,
                "k" => k = Some(value.parse::<f64>().map_err(|_| bad(key))?),
                "epsilon" => epsilon = Some(value.parse::<f64>().map_err(|_| bad(key))?),
                "regime" => regime = value.to_string(),
                "base" => cfg.base = value.parse()?,
                "trials" => cfg.trials = value.parse().map_err(|_| bad(key))?,
                "seed" => cfg.seed = value.parse().map_err(|_| bad(key))?,
                "probes" => {
                    cfg.probes = Some(
                        value
                            .split(',')
                            .map(|p| p.trim().parse::<usize>().map_err(|_| bad(key)))
                            .collect::<Result<_>>()?,
                    )
                }
                _ => return Err(Error::parse(idx + 1, format!("unknown key `{key}`"))),
            }
        }
        cfg.size = match (k, epsilon) {
            (Some(k), _) => SampleSize::Fixed(k),
            (None, Some(epsilon)) => match regime.as_str() {
                "per-query" => SampleSize::PerQuery { epsilon },
                "high-probability" => SampleSize::HighProbability { epsilon },
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "regime `{other}`: expected per-query or high-probability"
                    )))
                }
            },
            (None, None) => cfg.size,
        };
        Ok(cfg)
    }

    /// k for this config on an `n`-element space. The pairs method maps ε to
    /// `⌈64 ε⁻²⌉` pairs.
    pub fn resolve_k(&self, n: usize) -> Result<f64> {
        match (self.method, self.size) {
            (Method::Pairs, SampleSize::PerQuery { epsilon })
            | (Method::Pairs, SampleSize::HighProbability { epsilon }) => {
                Ok(pair_sample_size(epsilon)? as f64)
            }
            (_, size) => size.resolve(n),
        }
    }
}

/// What a target estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Target {
    /// W(v).
    Node(usize),
    /// aps(V).
    AllPairs,
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Node(v) => write!(f, "{v}"),
            Target::AllPairs => f.write_str("aps"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetStats {
    pub target: Target,
    pub truth: f64,
    pub mean: f64,
    /// Unbiased sample variance of the estimates.
    pub variance: f64,
    /// √(mean squared error) / truth.
    pub nrmse: f64,
}

impl TargetStats {
    /// |mean − truth| in units of the standard error of the mean.
    pub fn bias_in_standard_errors(&self, trials: usize) -> f64 {
        let se = (self.variance / trials as f64).sqrt();
        let bias = (self.mean - self.truth).abs();
        if bias == 0.0 {
            0.0
        } else {
            bias / se
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub method: Method,
    pub k: f64,
    pub trials: usize,
    pub targets: Vec<TargetStats>,
    /// `estimates[t][i]` is trial t's estimate for `targets[i]`.
    pub estimates: Vec<Vec<f64>>,
    pub max_relative_error: f64,
    /// Total resources over all trials (oracle work excluded).
    pub budget: Budget,
    /// Largest single-trial budget.
    pub max_trial_budget: Budget,
    /// Smallest measured PPS constant over trials: ĉ for γ (weighted) or for
    /// the pair distribution γρᵀ (pairs). `None` for the uniform method.
    pub pps_constant: Option<f64>,
    pub distribution: DistributionChecks,
}

impl ErrorReport {
    pub fn target(&self, target: Target) -> Option<&TargetStats> {
        self.targets.iter().find(|t| t.target == target)
    }

    /// Fraction of (trial, node-target) estimates whose relative error
    /// exceeds `threshold`.
    pub fn fraction_exceeding(&self, threshold: f64) -> f64 {
        let mut total = 0usize;
        let mut over = 0usize;
        for row in &self.estimates {
            for (stats, &e) in self.targets.iter().zip(row) {
                if matches!(stats.target, Target::Node(_)) && stats.truth > 0.0 {
                    total += 1;
                    if (e - stats.truth).abs() / stats.truth > threshold {
                        over += 1;
                    }
                }
            }
        }
        if total == 0 {
            0.0
        } else {
            over as f64 / total as f64
        }
    }

    /// `target,truth,mean,variance,nrmse` with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("target,truth,mean,variance,nrmse\n");
        for t in &self.targets {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                t.target, t.truth, t.mean, t.variance, t.nrmse
            ));
        }
        out
    }

    pub fn summary(&self) -> String {
        let worst = self
            .targets
            .iter()
            .map(|t| t.nrmse)
            .filter(|x| x.is_finite())
            .fold(0.0, f64::max);
        let mut s = format!(
            "method={} k={} trials={} targets={}\n\
             max_nrmse={worst} max_relative_error={}\n\
             distance_evals={} sssp_calls={} max_trial_distance_evals={} max_trial_sssp_calls={}\n",
            self.method,
            self.k,
            self.trials,
            self.targets.len(),
            self.max_relative_error,
            self.budget.distance_evals,
            self.budget.sssp_calls,
            self.max_trial_budget.distance_evals,
            self.max_trial_budget.sssp_calls,
        );
        if let Some(c) = self.pps_constant {
            s.push_str(&format!("pps_constant={c}\n"));
        }
        s.push_str(&format!(
            "distribution_checks high_average={} average_range={} median_spread={}\n",
            self.distribution.high_average,
            self.distribution.average_range,
            self.distribution.median_spread
        ));
        s
    }
}

/// min over (z,v) with dist(z,v) > 0 of γ_v·W(z)/dist(z,v), by brute force.
pub fn measure_pps_constant(coeffs: &CoefficientVector, space: &DistanceSpace) -> Result<f64> {
    oracle::cached(space)?.pps_constant(coeffs.gamma())
}

/// min over ordered pairs (i,j) with dist > 0 of γ_i·ρ_j·2·aps/dist(i,j).
pub fn pair_pps_constant(gamma: &[f64], rho: &[f64], truth: &ExactTruth) -> Result<f64> {
    let total = 2.0 * truth.aps();
    let mut best = f64::INFINITY;
    for i in 0..truth.n() {
        for j in 0..truth.n() {
            let d = truth.dist(i, j);
            if d > 0.0 {
                best = best.min(gamma[i] * rho[j] * total / d);
            }
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::DegenerateMetric)
    }
}

struct TrialOutcome {
    estimates: Vec<f64>,
    budget: Budget,
    pps: Option<f64>,
}

fn run_one(
    space: &DistanceSpace,
    truth: &ExactTruth,
    config: &TrialConfig,
    k: f64,
    seed: u64,
) -> Result<TrialOutcome> {
    let local = space.fork();
    let n = local.n();
    let (mut estimates, pps) = match config.method {
        Method::Weighted => {
            let (coeffs, sample) = build_sample(&local, config.base, k, seed)?;
            let mut w = estimate_all_nodes(&local, &sample)?.w_hat;
            let aps = w.iter().sum::<f64>() / 2.0;
            w.push(aps);
            let pps = truth.pps_constant(coeffs.gamma()).ok();
            (w, pps)
        }
        Method::Uniform => {
            let size = (k.round() as usize).clamp(1, n);
            let q = uniform_subset(n, size, seed);
            let scale = n as f64 / q.len() as f64;
            let mut w: Vec<f64> = sample_sums(&local, &q)?.into_iter().map(|s| s * scale).collect();
            let aps = w.iter().sum::<f64>() / 2.0;
            w.push(aps);
            (w, None)
        }
        Method::Pairs => {
            let out = estimate_aps_metric(&local, k.ceil() as usize, seed)?;
            let pps = pair_pps_constant(&out.coefficients.normalized(), &out.rho.rho, truth).ok();
            (vec![out.estimate], pps)
        }
    };
    if let (Some(probes), Method::Weighted | Method::Uniform) = (&config.probes, config.method) {
        let aps = estimates[n];
        estimates = probes.iter().map(|&v| estimates[v]).collect();
        estimates.push(aps);
    }
    Ok(TrialOutcome {
        estimates,
        budget: local.budget(),
        pps,
    })
}

/// Runs `config.trials` independent trials on `space`. Trial `t` uses seed
/// `derive_seed(config.seed, t)`, so the report does not depend on scheduling.
pub fn run_trials_on(space: &DistanceSpace, config: &TrialConfig) -> Result<ErrorReport> {
    if config.trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let n = space.n();
    if let Some(probes) = &config.probes {
        for &v in probes {
            if v >= n {
                return Err(Error::InvalidNode { node: v, n });
            }
        }
    }
    let k = config.resolve_k(n)?;
    let truth = oracle::cached(&space.fork())?;

    let targets: Vec<Target> = match (config.method, &config.probes) {
        (Method::Pairs, _) => vec![Target::AllPairs],
        (_, Some(probes)) => probes.iter().map(|&v| Target::Node(v)).chain([Target::AllPairs]).collect(),
        (_, None) => (0..n).map(Target::Node).chain([Target::AllPairs]).collect(),
    };
    let truths: Vec<f64> = targets
        .iter()
        .map(|t| match t {
            Target::Node(v) => truth.w()[*v],
            Target::AllPairs => truth.aps(),
        })
        .collect();

    let outcomes: Vec<TrialOutcome> = (0..config.trials)
        .into_par_iter()
        .map(|t| run_one(space, &truth, config, k, derive_seed(config.seed, t as u64)))
        .collect::<Result<_>>()?;

    let trials = outcomes.len();
    let mut stats = Vec::with_capacity(targets.len());
    let mut max_relative_error = 0.0f64;
    for (i, (&target, &truth)) in targets.iter().zip(&truths).enumerate() {
        let values: Vec<f64> = outcomes.iter().map(|o| o.estimates[i]).collect();
        let mean = values.iter().sum::<f64>() / trials as f64;
        let variance = if trials > 1 {
            values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (trials - 1) as f64
        } else {
            0.0
        };
        let mse = values.iter().map(|x| (x - truth).powi(2)).sum::<f64>() / trials as f64;
        let nrmse = if truth > 0.0 { mse.sqrt() / truth } else { f64::NAN };
        if truth > 0.0 {
            for x in &values {
                max_relative_error = max_relative_error.max((x - truth).abs() / truth);
            }
        }
        stats.push(TargetStats {
            target,
            truth,
            mean,
            variance,
            nrmse,
        });
    }

    let budget = outcomes
        .iter()
        .fold(Budget::default(), |acc, o| acc + o.budget);
    let max_trial_budget = Budget {
        distance_evals: outcomes.iter().map(|o| o.budget.distance_evals).max().unwrap_or(0),
        sssp_calls: outcomes.iter().map(|o| o.budget.sssp_calls).max().unwrap_or(0),
    };
    let pps_constant = outcomes
        .iter()
        .filter_map(|o| o.pps)
        .reduce(f64::min);

    Ok(ErrorReport {
        method: config.method,
        k,
        trials,
        targets: stats,
        estimates: outcomes.into_iter().map(|o| o.estimates).collect(),
        max_relative_error,
        budget,
        max_trial_budget,
        pps_constant,
        distribution: truth.distribution_checks(),
    })
}

/// Builds the configured instance and runs [`run_trials_on`].
pub fn run_trials(config: &TrialConfig) -> Result<ErrorReport> {
    let instance = config
        .instance
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("config names no instance".into()))?;
    run_trials_on(&instance.build(config.instance_seed), config)
}

/// Empirical coefficient of variation of the all-pairs estimates in a report.
pub fn aps_cv(report: &ErrorReport) -> Option<f64> {
    report
        .target(Target::AllPairs)
        .map(|t| t.variance.sqrt() / t.truth)
}
