use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use gmfbm_core::fbm::{sample_fbm_at, sample_fgn_regular};
use gmfbm_core::gmfbm::sample_timechanged_pair;
use gmfbm_core::randkit::{derive_stream, sample_tempered_stable_with, TemperingMethod};
use gmfbm_core::{GmfbmParams, HurstIndex, SubordinatorSpec, TimeChangedSpec, TimeGrid};

fn bench_fbm(c: &mut Criterion) {
    let mut group = c.benchmark_group("fbm");
    let h = HurstIndex::new(0.7).unwrap();
    let mut rng = derive_stream(1, 0);
    for n in [16usize, 128, 512] {
        group.throughput(Throughput::Elements(n as u64));
        let grid = TimeGrid::regular(n, 1.0).unwrap();
        group.bench_with_input(BenchmarkId::new("cholesky", n), &grid, |b, grid| {
            b.iter(|| sample_fbm_at(grid, h, &mut rng).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("circulant", n), &n, |b, &n| {
            b.iter(|| sample_fgn_regular(n, 1.0, h, &mut rng).unwrap())
        });
    }
    group.finish();
}

fn bench_tempered(c: &mut Criterion) {
    let mut group = c.benchmark_group("tempered_stable");
    let mut rng = derive_stream(2, 0);
    for dt in [1.0, 10.0, 100.0] {
        for (name, method) in [("substep", TemperingMethod::Substep), ("double_rejection", TemperingMethod::DoubleRejection)] {
            group.bench_with_input(BenchmarkId::new(name, dt), &dt, |b, &dt| {
                b.iter(|| sample_tempered_stable_with(&mut rng, 0.7, 1.0, black_box(dt), method).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_pairs(c: &mut Criterion) {
    let mut group = c.benchmark_group("timechanged_pair");
    let gm = GmfbmParams::new(1.0, 1.0, 0.55, 0.8).unwrap();
    let mut rng = derive_stream(3, 0);
    for (name, sub) in [("tss", SubordinatorSpec::tss(0.7, 1.0).unwrap()), ("gamma", SubordinatorSpec::gamma(1.0).unwrap())] {
        let spec = TimeChangedSpec::new(gm, sub);
        for t in [10.0, 1e4] {
            group.bench_with_input(BenchmarkId::new(name, t), &t, |b, &t| {
                b.iter(|| sample_timechanged_pair(&spec, 1.0, t, &mut rng).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_fbm, bench_tempered, bench_pairs);
criterion_main!(benches);
