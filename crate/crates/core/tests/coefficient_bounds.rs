//! Exhaustive checks of the coefficient and well-positioned bounds on a
//! mixed corpus of graphs and point sets.

use distsketch_core::apsum::{compute_rho, sample_pairs};
use distsketch_core::generators::{corpus, erdos_renyi, Instance};
use distsketch_core::sampling::{compute_coefficients, find_well_positioned, QuantileRank};
use distsketch_core::stats::pair_pps_constant;
use distsketch_core::{DistanceSpace, ExactTruth, PointSet};

const REL: f64 = 1e-9;

fn instances() -> Vec<(String, DistanceSpace)> {
    let mut out: Vec<(String, DistanceSpace)> = corpus(18, 90, 2024)
        .into_iter()
        .map(|(i, s)| (i.to_string(), s))
        .collect();
    // a shortest-path metric given as an explicit matrix
    let g: DistanceSpace = erdos_renyi(40, 0.08, 9).into();
    let truth = ExactTruth::compute(&g).unwrap();
    let d: Vec<f64> = (0..40)
        .flat_map(|u| (0..40).map(move |v| (u.min(v), u.max(v))))
        .map(|(a, b)| truth.dist(a, b))
        .collect();
    out.push(("matrix:40".into(), PointSet::from_matrix(40, d).unwrap().into()));
    out
}

fn argmin(values: &[f64]) -> usize {
    (0..values.len())
        .min_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)))
        .unwrap()
}

#[test]
fn well_positioned_structure() {
    for (name, space) in instances() {
        let truth = ExactTruth::compute(&space).unwrap();
        let n = truth.n();
        let wp = truth.classify(QuantileRank::median(n));
        assert!(wp.count() >= QuantileRank::median(n).get(), "{name}: too few well positioned");
        for u in (0..n).filter(|&u| wp.is_well_positioned(u)) {
            for z in 0..n {
                let bound = 3.0 * wp.m_median[z];
                assert!(truth.dist(z, u) <= bound + REL * bound.max(1.0), "{name}: z={z} u={u}");
            }
        }
        let found = find_well_positioned(&space, 11).unwrap();
        assert!(wp.is_well_positioned(found), "{name}: finder returned {found}");
    }
}

#[test]
fn universal_pps_with_well_positioned_base() {
    for (name, space) in instances() {
        let truth = ExactTruth::compute(&space).unwrap();
        let n = truth.n();
        let base = argmin(&truth.classify(QuantileRank::median(n)).m_median);
        let c = compute_coefficients(&space, &[base]).unwrap();
        let gamma = c.gamma();
        for z in 0..n {
            for v in 0..n {
                let need = truth.dist(z, v) / truth.w()[z] / 18.0;
                assert!(gamma[v] >= need * (1.0 - REL), "{name}: z={z} v={v}");
            }
        }
        assert!(truth.pps_constant(gamma).unwrap() >= 1.0 / 18.0 * (1.0 - REL));
        assert!(c.sum() <= 2.0 + REL);
        let bar: f64 = truth.gamma_bar().unwrap().iter().sum();
        assert!(bar <= 18.0 * c.sum() * (1.0 + REL), "{name}: Σγ̄={bar} Σγ={}", c.sum());
        assert!(bar <= 36.0 * (1.0 + REL));
    }
}

#[test]
fn rank_based_bound_for_every_base_node() {
    for (name, space) in instances().into_iter().step_by(2) {
        let truth = ExactTruth::compute(&space).unwrap();
        let n = truth.n();
        let per_base: Vec<Vec<f64>> = (0..n)
            .map(|u| compute_coefficients(&space, &[u]).unwrap().gamma().to_vec())
            .collect();
        for z in 0..n {
            if truth.w()[z] == 0.0 {
                continue;
            }
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| truth.dist(z, a).total_cmp(&truth.dist(z, b)).then(a.cmp(&b)));
            for (idx, &u) in order.iter().enumerate() {
                let q = (idx + 1) as f64 / n as f64;
                let factor = (1.0 - q) / 4.0 / truth.w()[z];
                for v in 0..n {
                    let need = factor * truth.dist(z, v);
                    assert!(per_base[u][v] >= need * (1.0 - REL), "{name}: z={z} u={u} v={v}");
                }
            }
        }
    }
}

#[test]
fn coefficient_sum_never_exceeds_one_plus_base() {
    for (name, space) in instances() {
        let n = space.n();
        for b in [1, 2, 5, n] {
            let base: Vec<usize> = (0..b.min(n)).collect();
            let c = compute_coefficients(&space, &base).unwrap();
            assert!(c.sum() <= 1.0 + base.len() as f64 + REL, "{name}: b={b}");
            assert!(c.gamma().iter().all(|&g| g >= 1.0 / n as f64));
        }
    }
}

#[test]
fn rough_estimates_sandwich_and_pair_constant() {
    for (name, space) in instances() {
        if space.is_graph() {
            continue;
        }
        let truth = ExactTruth::compute(&space).unwrap();
        let n = truth.n();
        let wp = truth.classify(QuantileRank::relaxed(n));
        let total_w: f64 = truth.w().iter().sum();
        for anchor in (0..n).filter(|&a| wp.is_well_positioned(a)) {
            let rho = compute_rho(&space, anchor).unwrap();
            for u in 0..n {
                let w = truth.w()[u];
                assert!(w <= rho.w_rough[u] * (1.0 + REL), "{name}: lower, anchor {anchor}");
                assert!(rho.w_rough[u] <= 16.0 * w * (1.0 + REL), "{name}: upper, anchor {anchor}");
                assert!(rho.rho[u] >= w / (16.0 * total_w) * (1.0 - REL), "{name}: floor");
            }
        }
        let anchor = argmin(&wp.m_median);
        let rho = compute_rho(&space, anchor).unwrap();
        let gamma = compute_coefficients(&space, &[anchor]).unwrap().normalized();
        let c = pair_pps_constant(&gamma, &rho.rho, &truth).unwrap();
        assert!(c >= 1.0 / 200.0, "{name}: pair constant {c}");
        let pairs = sample_pairs(&gamma, &rho, 2000, 3).unwrap();
        for &(i, j, p) in &pairs.pairs {
            assert!(truth.dist(i, j) / p <= 2.0 / c * truth.aps() * (1.0 + REL));
        }
    }
}

#[test]
fn distance_sum_distribution() {
    for (name, space) in instances() {
        let checks = ExactTruth::compute(&space).unwrap().distribution_checks();
        assert!(checks.all(), "{name}: {checks:?}");
    }
    for inst in [Instance::Path(2), Instance::Path(9), Instance::Clique(12), Instance::Star(30)] {
        let checks = ExactTruth::compute(&inst.build(0)).unwrap().distribution_checks();
        assert!(checks.all(), "{inst}: {checks:?}");
    }
}
