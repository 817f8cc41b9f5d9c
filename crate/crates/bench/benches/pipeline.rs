use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use distsketch_bench::{cloud, geometric, SEED};
use distsketch_core::apsum::estimate_aps_metric;
use distsketch_core::estimation::estimate_all_nodes;
use distsketch_core::oracle::exact_w_all;
use distsketch_core::sampling::{
    build_sample, compute_coefficients, draw_multiset, draw_sample, find_well_positioned_relaxed,
    sorted_uniform_draws, BasePolicy,
};
use std::hint::black_box;

fn coefficients(c: &mut Criterion) {
    let space = geometric(2000);
    c.bench_function("coefficients/rgg2000/b2", |b| {
        b.iter(|| compute_coefficients(&space, black_box(&[3, 1500])).unwrap())
    });
    let coeffs = compute_coefficients(&space, &[3, 1500]).unwrap();
    c.bench_function("draw_sample/rgg2000/k100", |b| {
        b.iter(|| draw_sample(&coeffs, black_box(100.0), SEED).unwrap())
    });
}

fn all_nodes(c: &mut Criterion) {
    let mut group = c.benchmark_group("all_nodes");
    group.sample_size(10);
    for n in [500usize, 2000] {
        let space = geometric(n);
        group.bench_with_input(BenchmarkId::new("sketch_k50", n), &n, |b, _| {
            b.iter(|| {
                let (_, sample) = build_sample(&space, BasePolicy::Uniform(2), 50.0, SEED).unwrap();
                estimate_all_nodes(&space, &sample).unwrap()
            })
        });
        group.bench_with_input(BenchmarkId::new("exact", n), &n, |b, _| {
            b.iter(|| exact_w_all(&space).unwrap())
        });
    }
    group.finish();
}

fn metric(c: &mut Criterion) {
    let space = cloud(5000);
    c.bench_function("relaxed_finder/cloud5000", |b| {
        b.iter(|| find_well_positioned_relaxed(&space, black_box(SEED)).unwrap())
    });
    c.bench_function("aps_pairs/cloud5000/k6400", |b| {
        b.iter(|| estimate_aps_metric(&space, black_box(6400), SEED).unwrap())
    });
}

fn draws(c: &mut Criterion) {
    c.bench_function("sorted_uniform_draws/100k", |b| {
        b.iter(|| sorted_uniform_draws(black_box(100_000), SEED))
    });
    let probs = vec![1.0 / 10_000.0; 10_000];
    c.bench_function("draw_multiset/n10k/k100k", |b| {
        b.iter(|| draw_multiset(black_box(&probs), 100_000, SEED).unwrap())
    });
}

criterion_group!(benches, coefficients, all_nodes, metric, draws);
criterion_main!(benches);
