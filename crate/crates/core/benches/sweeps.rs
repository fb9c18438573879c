use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use djcm_core::config::{RunConfig, SweepPhase};
use djcm_core::scenarios::{catalog, run_all, run_scenario};
use djcm_core::{Execution, Solver};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn phase_sweep(c: &mut Criterion) {
    let values: Vec<f64> = (0..64).map(|k| 2.0 * PI * k as f64 / 64.0).collect();
    let scenario = RunConfig::default_two_atom()
        .phase_sweep("bench", SweepPhase::Theta1, &values)
        .unwrap();
    let mut group = c.benchmark_group("theta1_sweep_64");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run_scenario(black_box(&scenario), Solver::default(), exec).unwrap())
        });
    }
    group.finish();
}

fn distance_scenario(c: &mut Criterion) {
    let scenario = catalog().into_iter().find(|s| s.name == "fig2a").unwrap();
    let mut group = c.benchmark_group("fig2a");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run_scenario(black_box(&scenario), Solver::default(), exec).unwrap())
        });
    }
    group.finish();
}

fn whole_catalog(c: &mut Criterion) {
    let scenarios = catalog();
    let mut group = c.benchmark_group("catalog");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run_all(black_box(&scenarios), Solver::default(), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, phase_sweep, distance_scenario, whole_catalog);
criterion_main!(benches);
