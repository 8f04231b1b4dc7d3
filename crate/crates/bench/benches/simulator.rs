//! Benchmarks for the hot paths: amplitude propagation, circuit alignment,
//! calibration repair, both brute-force oracles, and a small end-to-end
//! sweep. Oracle and sweep benches use reduced sample counts because a
//! single iteration already covers millions of grid evaluations.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use idpsim_cli::sweep::{run_sweep, RunConfig};
use idpsim_core::{
    align, calibrated_pbs, idp_povm_search, make_states, propagate, run_pair,
    von_neumann_search, InterferometerConfig, JonesVector, PbsCalibration, PbsSet,
};

fn reference_calibration() -> PbsCalibration {
    PbsCalibration::new(0.982, 0.009, 0.0045, 0.0045, 0.0045, 0.0045, 0.982, 0.009).unwrap()
}

fn bench_propagation(c: &mut Criterion) {
    let source = JonesVector::horizontal();
    let ideal = align(22.5, &InterferometerConfig::new(PbsSet::ideal())).unwrap();
    let calibrated_set = PbsSet::from_calibration(&reference_calibration()).unwrap();
    let calibrated = align(22.5, &InterferometerConfig::new(calibrated_set)).unwrap();

    c.bench_function("propagate_ideal", |b| {
        b.iter(|| propagate(black_box(&source), black_box(&ideal)).unwrap())
    });
    c.bench_function("propagate_calibrated", |b| {
        b.iter(|| propagate(black_box(&source), black_box(&calibrated)).unwrap())
    });
    c.bench_function("run_pair_calibrated", |b| {
        b.iter(|| run_pair(black_box(22.5), black_box(&calibrated)).unwrap())
    });
}

fn bench_alignment(c: &mut Criterion) {
    let ideal_base = InterferometerConfig::new(PbsSet::ideal());
    let calibrated_base =
        InterferometerConfig::new(PbsSet::from_calibration(&reference_calibration()).unwrap());

    c.bench_function("align_ideal", |b| {
        b.iter(|| align(black_box(17.0), black_box(&ideal_base)).unwrap())
    });
    c.bench_function("align_calibrated", |b| {
        b.iter(|| align(black_box(17.0), black_box(&calibrated_base)).unwrap())
    });
    c.bench_function("calibrated_pbs_repair", |b| {
        let cal = reference_calibration();
        b.iter(|| calibrated_pbs(black_box(&cal)).unwrap())
    });
}

fn bench_oracles(c: &mut Criterion) {
    let pair = make_states(22.5).unwrap();
    let mut group = c.benchmark_group("oracles");
    group.sample_size(10);
    group.bench_function("von_neumann_search_10k", |b| {
        b.iter(|| von_neumann_search(black_box(&pair), black_box(10_000)).unwrap())
    });
    group.bench_function("idp_povm_search_1000sq", |b| {
        b.iter(|| idp_povm_search(black_box(&pair), black_box(1000)).unwrap())
    });
    group.finish();
}

fn bench_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    group.bench_function("ideal_default_grid", |b| {
        let config = RunConfig::default();
        b.iter(|| run_sweep(black_box(&config)).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_propagation,
    bench_alignment,
    bench_oracles,
    bench_sweep
);
criterion_main!(benches);
