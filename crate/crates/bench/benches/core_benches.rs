use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use jumpflow_core::integrator::evolve_deterministic;
use jumpflow_core::levy::Band;
use jumpflow_core::operators::{pairing_diff, HKind};
use jumpflow_core::{
    DriftOperator, GridFunction, LevyNoiseModel, NormSuite, RngStream, SimConfig,
};

fn rough_state(n: usize) -> GridFunction {
    let mut u = GridFunction::zeros(n);
    for j in 1..=n.min(12) {
        u.axpy(1.0 / j as f64, &GridFunction::sine_mode(j, n));
    }
    u
}

fn bench_apply(c: &mut Criterion) {
    let mut group = c.benchmark_group("apply_drift");
    for n in [32usize, 128] {
        let u = rough_state(n);
        let mut out = GridFunction::zeros(n);
        let pl = DriftOperator::p_laplace(1.5).unwrap();
        group.bench_with_input(BenchmarkId::new("p_laplace", n), &n, |b, _| {
            b.iter(|| pl.apply_into(&u, &mut out))
        });
        let fd = DriftOperator::fast_diffusion(0.5).unwrap();
        group.bench_with_input(BenchmarkId::new("fast_diffusion", n), &n, |b, _| {
            b.iter(|| fd.apply_into(&u, &mut out))
        });
    }
    group.finish();
}

fn bench_norms(c: &mut Criterion) {
    let mut group = c.benchmark_group("norms");
    let n = 128;
    let u = rough_state(n);
    let pl = DriftOperator::p_laplace(1.5).unwrap();
    let fd = DriftOperator::fast_diffusion(0.5).unwrap();
    let l2 = NormSuite::for_operator(&pl);
    let hm1 = NormSuite::for_operator(&fd);
    group.bench_function("h_norm_l2", |b| b.iter(|| l2.h_norm_sq(&u)));
    group.bench_function("h_norm_hminus1", |b| b.iter(|| hm1.h_norm_sq(&u)));
    group.bench_function("v_norm_grad_lp", |b| b.iter(|| l2.v_norm(&u)));
    group.finish();
}

fn bench_pairing(c: &mut Criterion) {
    let n = 128;
    let u = rough_state(n);
    let v = u.scaled(0.5);
    let pl = DriftOperator::p_laplace(1.5).unwrap();
    let ns = NormSuite::for_operator(&pl);
    c.bench_function("pairing_diff_p_laplace", |b| {
        b.iter(|| pairing_diff(&pl, &ns, &u, &v))
    });
}

fn bench_schedule(c: &mut Criterion) {
    let noise =
        LevyNoiseModel::cylindrical_stable(1.5, vec![1.0, 0.5], 32, HKind::L2, 1e-3).unwrap();
    let band = Band::above(1.0);
    c.bench_function("sample_schedule_1k_events", |b| {
        let horizon = 1000.0 / noise.large_jump_rate(1.0).unwrap();
        b.iter(|| noise.sample_schedule(band, horizon, RngStream::new(1, 2)).unwrap())
    });
}

fn bench_evolve(c: &mut Criterion) {
    let op = DriftOperator::p_laplace(1.5).unwrap();
    let ns = NormSuite::for_operator(&op);
    let x = rough_state(32);
    let cfg = SimConfig::new(0.05, RngStream::new(3, 0)).with_record_dt(0.05);
    c.bench_function("evolve_deterministic_t0.05", |b| {
        b.iter(|| evolve_deterministic(&x, &op, &ns, &cfg).unwrap())
    });
}

criterion_group!(
    benches,
    bench_apply,
    bench_norms,
    bench_pairing,
    bench_schedule,
    bench_evolve
);
criterion_main!(benches);
