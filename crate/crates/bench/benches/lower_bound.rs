use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use detour_core::bounds::{b_of_k, f_k, inner_min, OMode, PROFILE_EPS, SKIP_EPS};

fn sixteen_profiles(c: &mut Criterion) {
    c.bench_function("f_k", |b| {
        b.iter(|| black_box(f_k(0.5, black_box(0.2), black_box(0.8), 0.3, PROFILE_EPS, SKIP_EPS)))
    });
}

fn grid_minimum(c: &mut Criterion) {
    let mut group = c.benchmark_group("inner_min");
    group.sample_size(10);
    for n in [100, 300, 1000] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| black_box(inner_min(0.2, 0.5, n, PROFILE_EPS)))
        });
    }
    group.finish();
}

fn o_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("b_of_k");
    group.sample_size(10);
    for mode in [OMode::Fixed05, OMode::Sweep] {
        group.bench_function(mode.to_string(), |b| {
            b.iter(|| black_box(b_of_k(0.2, 200, mode, PROFILE_EPS).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, sixteen_profiles, grid_minimum, o_sweep);
criterion_main!(benches);
