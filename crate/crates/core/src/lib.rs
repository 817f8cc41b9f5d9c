//! Distance-sum sketches from a single weighted sample.
//!
//! A universal PPS sample of expected size O(k) supports unbiased estimates of
//! W(v) = Σ_u dist(v,u) for every node of a graph or every query point of a
//! metric space, with coefficient of variation O(1/√k). From those follow
//! closeness centralities, an approximate 1-median, and the all-pairs
//! distance sum.
//!
//! ```
//! use distsketch_core::{generators, sampling, estimation, oracle, DistanceSpace};
//!
//! let space: DistanceSpace = generators::path(5).into();
//! let (_, sample) = sampling::build_sample(&space, sampling::BasePolicy::Uniform(2), 5.0, 7).unwrap();
//! let estimates = estimation::estimate_all_nodes(&space, &sample).unwrap();
//! // with k ≥ n every probability is 1 and the estimates are exact
//! assert_eq!(estimates.w_hat, oracle::exact_w_all(&space).unwrap());
//! ```

pub mod apsum;
pub mod baseline;
pub mod error;
pub mod estimation;
pub mod generators;
pub mod hardness;
pub mod io;
pub mod oracle;
pub mod sampling;
pub mod seed;
pub mod space;
pub mod stats;

pub use apsum::{PairSample, RhoVector};
pub use error::{Error, Result};
pub use estimation::{CentralityVector, EstimateVector, Query};
pub use hardness::{ReducedInstance, SignedGraph};
pub use oracle::ExactTruth;
pub use sampling::{BasePolicy, CoefficientVector, QuantileRank, SampleSize, WeightedSample};
pub use space::{Budget, DistanceSpace, DistanceVector, Graph, PointSet};
pub use stats::{ErrorReport, Method, TrialConfig};
