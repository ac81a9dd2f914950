use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use metac_bench::{chain_system, scaled_dentist};
use metac_core::corpus;
use metac_core::timing_bool::count_constraint_rules;
use metac_core::{
    compile_bool, compile_dc, dc_feasible, enumerate_dc_models, enumerate_equilibrium_models,
    metric_equilibrium_models, EnumConfig,
};

fn compile_pipelines(c: &mut Criterion) {
    let dentist = corpus::dentist();
    let mut group = c.benchmark_group("compile");
    group.sample_size(20);
    group.bench_function("bool dentist lambda=4 nu=110", |b| {
        b.iter(|| compile_bool(black_box(&dentist), 4, 110, true).unwrap())
    });
    for scale in [1u32, 5, 10] {
        let scaled = scaled_dentist(scale);
        group.bench_function(format!("dc dentist lambda=4 x{scale}"), |b| {
            b.iter(|| compile_dc(black_box(&scaled), 4, true).unwrap())
        });
    }
    group.bench_function("bool veto count dentist x10 nu=1100", |b| {
        let scaled = scaled_dentist(10);
        b.iter(|| count_constraint_rules(black_box(&scaled), 4, 1100))
    });
    group.finish();
}

fn solvers(c: &mut Criterion) {
    let reduced = corpus::dentist_reduced();
    let config = EnumConfig { atom_cap: 64 };
    let mut group = c.benchmark_group("solve");
    group.sample_size(20);
    let bool_prog = compile_bool(&reduced, 3, 6, true).unwrap();
    group.bench_function("internal bool reduced dentist", |b| {
        b.iter(|| enumerate_equilibrium_models(black_box(&bool_prog), config).unwrap())
    });
    let dc_prog = compile_dc(&reduced, 3, true).unwrap();
    group.bench_function("internal dc reduced dentist", |b| {
        b.iter(|| enumerate_dc_models(black_box(&dc_prog), Some(6), config).unwrap())
    });
    group.bench_function("oracle reduced dentist", |b| {
        b.iter(|| metric_equilibrium_models(black_box(&reduced), 3, 6).unwrap())
    });
    group.finish();
}

fn feasibility(c: &mut Criterion) {
    let mut group = c.benchmark_group("dc_feasible");
    for length in [10usize, 100] {
        let sys = chain_system(length);
        group.bench_function(format!("chain of {length}"), |b| {
            b.iter(|| dc_feasible(black_box(&sys)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, compile_pipelines, solvers, feasibility);
criterion_main!(benches);
