use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use raylab_core::bargmann::{bargmann_invariant, polygon_phase_check, FreeGeodesicConnector};
use raylab_core::charts::GaussianChart;
use raylab_core::nullphase::{bargmann_reality_test, free_geodesic, separability_test, TripleSampling};
use raylab_core::riemann::geodesic_shoot;
use raylab_core::sampling::{random_smooth_curve, random_state, random_state_near, rng};
use raylab_core::VertexList;

fn bargmann(c: &mut Criterion) {
    let mut g = rng(42);
    let mut group = c.benchmark_group("bargmann_invariant");
    for n in [3, 8, 32] {
        let v = VertexList::new((0..n).map(|_| random_state(&mut g, 16)).collect()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &v, |b, v| b.iter(|| bargmann_invariant(black_box(v))));
    }
    group.finish();

    let a = random_state(&mut g, 4);
    let v = VertexList::new(vec![a.clone(), random_state_near(&mut g, &a, 0.3), random_state_near(&mut g, &a, 0.3)])
        .unwrap();
    c.bench_function("polygon_phase_check/3x512", |b| {
        b.iter(|| polygon_phase_check(black_box(&v), &FreeGeodesicConnector, 512))
    });
}

fn geometric_phase(c: &mut Criterion) {
    let curve = random_smooth_curve(&mut rng(42), 4, 1001).unwrap();
    c.bench_function("geometric_phase/1001", |b| b.iter(|| black_box(&curve).geometric_phase()));
    let fd = curve.clone().without_tangents();
    c.bench_function("geometric_phase/1001/finite-difference", |b| b.iter(|| black_box(&fd).geometric_phase()));
}

fn geodesics(c: &mut Criterion) {
    let chart = GaussianChart::default();
    c.bench_function("geodesic_shoot/gaussian/1000", |b| {
        b.iter(|| geodesic_shoot(&chart, black_box(&[0.0, 1.0]), &[1.0, 0.2], 1.5, 1000))
    });
}

fn null_phase(c: &mut Criterion) {
    let mut g = rng(42);
    let a = random_state(&mut g, 4);
    let geo = free_geodesic(&a, &random_state_near(&mut g, &a, 0.3), 257).unwrap();
    c.bench_function("separability_test/257", |b| b.iter(|| separability_test(black_box(&geo), None)));
    let spec = TripleSampling::default();
    c.bench_function("bargmann_reality_test/257", |b| b.iter(|| bargmann_reality_test(black_box(&geo), &spec)));
}

criterion_group!(benches, bargmann, geometric_phase, geodesics, null_phase);
criterion_main!(benches);
