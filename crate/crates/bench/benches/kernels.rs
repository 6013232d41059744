use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use smoothfe_bench::{argyris, hilbert, hu_zhang, stokes_complex};
use smoothfe_core::bernstein::TriangleGeom;
use smoothfe_core::complexes::{verify_complex, VerifyOptions};
use smoothfe_core::elements::check_unisolvence;
use smoothfe_core::exact_linalg::rank;

fn linear_algebra(c: &mut Criterion) {
    let h = hilbert(24);
    c.bench_function("rank hilbert 24", |b| b.iter(|| rank(black_box(&h))));
}

fn unisolvence(c: &mut Criterion) {
    let t = TriangleGeom::reference();
    let a = argyris();
    c.bench_function("unisolvence argyris", |b| {
        b.iter(|| check_unisolvence(black_box(&a), &t).unwrap())
    });
    let hz = hu_zhang();
    c.bench_function("unisolvence hu-zhang", |b| {
        b.iter(|| check_unisolvence(black_box(&hz), &t).unwrap())
    });
}

fn complexes(c: &mut Criterion) {
    let (spec, mesh) = stokes_complex();
    let mut g = c.benchmark_group("complex");
    g.sample_size(10);
    g.bench_function("derham k=4 on 8 triangles", |b| {
        b.iter(|| verify_complex(black_box(&spec), &mesh, &VerifyOptions::default()).unwrap())
    });
    g.finish();
}

criterion_group!(benches, linear_algebra, unisolvence, complexes);
criterion_main!(benches);
