use criterion::{criterion_group, criterion_main, Criterion, Throughput};
use rlmc_bench::{spd_config, sphere_config};
use rlmc_core::{run_ensemble, run_trajectory, Observable, PotentialSpec};

fn trajectories(c: &mut Criterion) {
    let mut group = c.benchmark_group("trajectory");
    let sphere = sphere_config(0.1, 5.0);
    group.throughput(Throughput::Elements(50));
    group.bench_function("sphere, 50 steps", |b| b.iter(|| run_trajectory(&sphere, 3)));
    let spd = spd_config(PotentialSpec::DoubleWell, 0.1, 5.0);
    group.bench_function("double-well, 50 steps", |b| b.iter(|| run_trajectory(&spd, 3)));
    group.finish();
}

fn ensembles(c: &mut Criterion) {
    let mut group = c.benchmark_group("ensemble");
    group.sample_size(10);
    let sphere = sphere_config(0.1, 5.0);
    group.throughput(Throughput::Elements(5000));
    group.bench_function("sphere, L = 5000", |b| {
        b.iter(|| run_ensemble(&sphere, &Observable::SinR, 5000, None))
    });
    group.finish();
}

criterion_group!(benches, trajectories, ensembles);
criterion_main!(benches);
