use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use detour_bench::{balanced, corpus, mechanisms};
use detour_core::verify::{check_incentives, grid_opt, IncentiveCheck, Objective};
use detour_core::Mechanism;

fn outcomes(c: &mut Criterion) {
    let insts = corpus(256);
    let mut group = c.benchmark_group("outcome");
    for m in mechanisms() {
        group.bench_function(m.to_string(), |b| {
            b.iter(|| {
                for inst in &insts {
                    black_box(m.outcome(black_box(inst)).unwrap());
                }
            })
        });
    }
    group.finish();
}

fn incentive_checks(c: &mut Criterion) {
    let mut group = c.benchmark_group("check_incentives");
    group.sample_size(10);
    let inst = balanced(3);
    for m in mechanisms().into_iter().filter(|m| m.to_string() != "optmc") {
        for size in [1, 2] {
            let opts = IncentiveCheck {
                coalition_size: size,
                resolution: 100,
                ..IncentiveCheck::default()
            };
            group.bench_with_input(BenchmarkId::new(m.to_string(), size), &opts, |b, opts| {
                b.iter(|| black_box(check_incentives(&m, &inst, opts).unwrap()))
            });
        }
    }
    group.finish();
}

fn brute_force_optimum(c: &mut Criterion) {
    let inst = balanced(4);
    let mut group = c.benchmark_group("grid_opt");
    group.sample_size(10);
    for res in [100, 500] {
        group.bench_with_input(BenchmarkId::from_parameter(res), &res, |b, &res| {
            b.iter(|| black_box(grid_opt(&inst, Objective::MaxCost, res).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, outcomes, incentive_checks, brute_force_optimum);
criterion_main!(benches);
