//! Fixed benchmark inputs.

use distsketch_core::generators::{random_geometric, uniform_cloud};
use distsketch_core::DistanceSpace;

pub const SEED: u64 = 42;

/// Connected random geometric graph in the unit square.
pub fn geometric(n: usize) -> DistanceSpace {
    random_geometric(n, SEED).into()
}

/// Uniform points in the unit square.
pub fn cloud(n: usize) -> DistanceSpace {
    uniform_cloud(n, 2, SEED).into()
}
