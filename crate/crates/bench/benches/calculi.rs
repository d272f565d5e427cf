use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qcalc_bench::{operator, profile};
use qcalc_core::operator::kernel;
use qcalc_core::{calc, hinf, CalcKind, CalcOptions, KernelKind, Quaternion, SlicePoint, StemFunction};

fn kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group("kernel");
    for dim in [4, 16] {
        let t = operator(dim);
        let s = SlicePoint::new(-0.4, 1.3, Quaternion::E1);
        for kind in [KernelKind::SL, KernelKind::P2L, KernelKind::FL] {
            group.bench_with_input(BenchmarkId::new(format!("{kind:?}"), dim), &t, |b, t| {
                b.iter(|| kernel(kind, t, black_box(&s)).unwrap())
            });
        }
    }
    group.finish();
}

fn decaying(c: &mut Criterion) {
    let mut group = c.benchmark_group("calc");
    group.sample_size(20);
    let f = StemFunction::regularizer(2).unwrap();
    for dim in [4, 8] {
        let t = operator(dim);
        for kind in [CalcKind::S, CalcKind::F] {
            group.bench_with_input(BenchmarkId::new(kind.name(), dim), &t, |b, t| {
                b.iter(|| calc(kind, t, black_box(&f), &profile(), &CalcOptions::default()).unwrap())
            });
        }
    }
    group.finish();
}

fn h_infinity(c: &mut Criterion) {
    let mut group = c.benchmark_group("hinf");
    group.sample_size(10);
    let t = operator(4);
    let f = StemFunction::power(3);
    for kind in [CalcKind::S, CalcKind::F] {
        group.bench_function(kind.name(), |b| b.iter(|| hinf(kind, &t, black_box(&f), &profile(), &CalcOptions::default()).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, kernels, decaying, h_infinity);
criterion_main!(benches);
